use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mimo_core::channel::{correlation, draw_directions, steering_matrix};
use mimo_core::closed_form::{prepare_spectrum, ser_closed_form_with, EigenDensity, Modulation, SystemParams};
use mimo_core::coupling::{coupling_for_layout, CouplingParams};
use mimo_core::geometry::sample_bpp;
use mimo_core::monte_carlo::{mc_rate, Environment, Scenario, SnrModel};
use mimo_core::special::{cosine_integral, sine_integral};

const LAMBDA: f64 = 0.12;

fn special(c: &mut Criterion) {
    c.bench_function("si_ci_log_grid", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..100 {
                let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
                acc += sine_integral(x).unwrap() + cosine_integral(x).unwrap();
            }
            black_box(acc)
        })
    });
}

fn spectrum(m: usize) -> Vec<f64> {
    let layout = sample_bpp(m, LAMBDA, 1).unwrap();
    let a = steering_matrix(&layout, &draw_directions(100, 2).unwrap(), LAMBDA).unwrap();
    let c = coupling_for_layout(&layout, &CouplingParams::half_wave(LAMBDA)).unwrap().c;
    prepare_spectrum(&correlation(&c, &a).unwrap().tau).unwrap().tau
}

fn coupling(c: &mut Criterion) {
    let layout = sample_bpp(100, 3.0 * LAMBDA, 1).unwrap();
    let p = CouplingParams::half_wave(LAMBDA);
    c.bench_function("coupling_matrix_m100", |b| b.iter(|| black_box(coupling_for_layout(&layout, &p).unwrap())));
}

fn closed_form(c: &mut Criterion) {
    let tau = spectrum(20);
    c.bench_function("eigen_density_m20_k2", |b| b.iter(|| black_box(EigenDensity::new(&tau, 2).unwrap())));
    let density = EigenDensity::new(&tau, 2).unwrap();
    let mut params = SystemParams::new(10.0, vec![1.0, 0.5], 20);
    params.modulation = vec![Modulation::QPSK; 2];
    c.bench_function("ser_closed_form_m20_k2", |b| {
        b.iter(|| black_box(ser_closed_form_with(&params, &density).unwrap()))
    });
}

fn monte_carlo(c: &mut Criterion) {
    let env = Environment { coupling: CouplingParams::half_wave(LAMBDA), directions: draw_directions(100, 3).unwrap() };
    let layout = sample_bpp(64, 2.0 * LAMBDA, 4).unwrap();
    let scn = Scenario::build(&env, &layout, vec![1.0; 4], 10.0).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("zf_rate_m64_k4_1000_trials", |b| {
        b.iter(|| black_box(mc_rate(&scn, SnrModel::ZeroForcing, 1000, 5).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, special, coupling, closed_form, monte_carlo);
criterion_main!(benches);
