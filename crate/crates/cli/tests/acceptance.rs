//! One test per acceptance criterion. Each prints a single PASS/FAIL line with
//! the measured value, the pinned tolerance and the elapsed time against its
//! budget. Run with `cargo test -p mimo-sim --test acceptance -- --nocapture`.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use mimo_sim::validate::{run_criterion, BUDGET_SECONDS};
use mimo_sim::{Context, ExperimentConfig};

fn context() -> &'static Context {
    static CTX: OnceLock<Context> = OnceLock::new();
    CTX.get_or_init(|| Context::new(ExperimentConfig::default()).expect("default configuration is valid"))
}

fn check(id: usize) {
    let start = Instant::now();
    let r = run_criterion(context(), id, 1.0).expect("criterion runs without numeric failure");
    let secs = start.elapsed().as_secs_f64();
    let budget = BUDGET_SECONDS[id - 1];
    let in_budget = secs <= budget;
    println!(
        "criterion {id:>2} [{}] {}: {}; tolerance {}; {secs:.1}s of {budget:.0}s",
        if r.passed && in_budget { "PASS" } else { "FAIL" },
        r.title,
        r.measured,
        r.tolerance
    );
    assert!(r.passed, "criterion {id} outside tolerance: {}", r.measured);
    assert!(in_budget, "criterion {id} took {secs:.1}s, budget {budget}s");
}

#[test]
fn criterion_01_special_functions() {
    check(1);
}

#[test]
fn criterion_02_bpp_distances() {
    check(2);
}

#[test]
fn criterion_03_coupling_identity() {
    check(3);
}

#[test]
fn criterion_04_eigenvalue_anchors() {
    check(4);
}

#[test]
fn criterion_05_gain() {
    check(5);
}

#[test]
fn criterion_06_rate_bound() {
    check(6);
}

#[test]
fn criterion_07_ser() {
    check(7);
}

#[test]
fn criterion_08_outage() {
    check(8);
}

#[test]
fn criterion_09_large_array_convergence() {
    check(9);
}

#[test]
fn criterion_10_correlation_trend() {
    check(10);
}

#[test]
fn criterion_11_rate_maximum() {
    check(11);
}

#[test]
fn criterion_12_determinism() {
    check(12);
    // The whole report must also be byte-identical across processes and thread counts.
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_mimo-sim"))
            .args(["validate", "--only", "1,3,5"])
            .env("MIMO_SIM_THREADS", threads)
            .output()
            .expect("binary runs");
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let a = run("1");
    let b = run("3");
    println!(
        "criterion 12 [{}] validate report across processes (1 vs 3 threads)",
        if a == b { "PASS" } else { "FAIL" }
    );
    assert_eq!(a, b);
}
