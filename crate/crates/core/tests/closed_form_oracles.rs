use mimo_core::channel::{complex_gaussian, hermitian_eigenvalues};
use mimo_core::closed_form::*;
use mimo_core::monte_carlo::{mc_gain, mc_ser, Scenario, SnrModel};
use mimo_core::quadrature::{integrate, integrate_to_infinity, integrate_with_breaks};
use mimo_core::rng::seeded;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

const TAU6: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 6.0, 9.0];

fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// A random M×P product B whose Ψ = B Bᴴ has the given ascending spectrum.
fn product_with_spectrum(tau: &[f64], p: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let m = tau.len();
    let q = DMatrix::from_fn(m, m, |_, _| complex_gaussian(rng)).qr().q();
    let v = DMatrix::from_fn(p, p, |_, _| complex_gaussian(rng)).qr().q();
    let mut s = DMatrix::zeros(m, p);
    for (i, t) in tau.iter().enumerate() {
        s[(i, i)] = Complex64::new(t.sqrt(), 0.0);
    }
    q * s * v.adjoint()
}

fn draw_h(p: usize, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(p, k, |_, _| complex_gaussian(rng))
}

#[test]
fn single_density_integrates_to_one() {
    let tau = [1.0, 2.0, 4.0];
    let d = SingleUserDensity::new(&tau).unwrap();
    let r = integrate_to_infinity(|x| d.pdf(x).unwrap(), 0.0, 1e-12, 1e-10).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    assert!(d.pdf(500.0).unwrap() < 1e-40);
}

#[test]
fn single_density_matches_sampled_quadratic_form() {
    let tau = [0.5, 1.5, 4.0];
    let mut rng = seeded(101);
    let b = product_with_spectrum(&tau, 5, &mut rng);
    let mut samples: Vec<f64> = (0..100_000).map(|_| (&b * draw_h(5, 1, &mut rng)).norm_squared()).collect();
    let d = SingleUserDensity::new(&tau).unwrap();
    let cdf = |x: f64| integrate(|t| d.pdf(t).unwrap(), 0.0, x, 1e-13, 1e-11).unwrap().value;
    let mut grid: Vec<(f64, f64)> = Vec::new();
    let mut x = 0.0;
    while x < 80.0 {
        grid.push((x, cdf(x)));
        x += 0.05;
    }
    let interp = |v: f64| {
        let i = ((v / 0.05) as usize).min(grid.len() - 2);
        let (x0, f0) = grid[i];
        let (x1, f1) = grid[i + 1];
        f0 + (f1 - f0) * (v - x0) / (x1 - x0)
    };
    let ks = ks_statistic(&mut samples, interp);
    assert!(ks < 0.02, "KS {ks}");
}

#[test]
fn k1_multi_density_reduces_to_single() {
    let tau = [0.7, 1.3, 2.9, 5.0];
    let single = SingleUserDensity::new(&tau).unwrap();
    let multi = EigenDensity::new(&tau, 1).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let x = 0.3 * i as f64;
        worst = worst.max((single.pdf(x).unwrap() - multi.pdf(x).unwrap()).abs());
    }
    assert!(worst < 1e-9, "{worst}");
    assert!((multi.mean() - tau.iter().sum::<f64>()).abs() < 1e-10);
}

#[test]
fn multi_density_normalization_and_positivity() {
    let d = EigenDensity::new(&TAU6, 2).unwrap();
    let hi = d.support_end();
    let r = integrate_with_breaks(|x| d.pdf(x).unwrap(), &d.breakpoints(hi), 1e-13, 1e-11).unwrap();
    assert!((r.value - 1.0).abs() < 1e-5, "{}", r.value);
    for i in 0..1000 {
        assert!(d.pdf(hi * i as f64 / 1000.0).unwrap() >= 0.0);
    }
}

#[test]
fn multi_density_matches_sampled_eigenvalues() {
    let mut rng = seeded(202);
    let b = product_with_spectrum(&TAU6, 8, &mut rng);
    let mut samples = Vec::new();
    for _ in 0..10_000 {
        let bh = &b * draw_h(8, 2, &mut rng);
        samples.extend(hermitian_eigenvalues(&(bh.adjoint() * bh)).unwrap());
    }
    let d = EigenDensity::new(&TAU6, 2).unwrap();
    let ks = ks_statistic(&mut samples, |y| d.cdf(y));
    assert!(ks < 0.02, "KS {ks}");
}

#[test]
fn inverse_moment_matches_quadrature_and_sampling() {
    let d = EigenDensity::new(&TAU6, 2).unwrap();
    let hi = d.support_end();
    let q = 2.0
        * integrate_with_breaks(
            |x| if x > 0.0 { d.pdf(x).unwrap() / x } else { 0.0 },
            &d.breakpoints(hi),
            1e-14,
            1e-12,
        )
        .unwrap()
        .value;
    assert!((d.mean_inverse_sum() - q).abs() < 1e-8 * q, "{} vs {q}", d.mean_inverse_sum());

    let mut rng = seeded(303);
    let b = product_with_spectrum(&TAU6, 6, &mut rng);
    let n = 40_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            let bh = &b * draw_h(6, 2, &mut rng);
            let w = bh.adjoint() * bh;
            (w.try_inverse().unwrap().trace()).re
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    assert!((mean - q).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean} vs {q}");
}

#[test]
fn outage_terms_match_density_quadrature() {
    let d = EigenDensity::new(&TAU6, 2).unwrap();
    for y in [0.2, 1.0, 3.0, 7.5, 20.0, 60.0] {
        let q = integrate_with_breaks(|x| d.pdf(x).unwrap(), &d.breakpoints(y), 1e-15, 1e-12).unwrap().value;
        assert!((d.cdf(y) - q).abs() < 1e-10, "y={y}: {} vs {q}", d.cdf(y));
    }
    assert!((d.cdf_with(3.0, OutageExponent::AsPrinted) - 0.005_861_814_9).abs() > 0.5);
}

#[test]
fn outage_limits_and_quadrature_agreement() {
    let beta = vec![0.05, 0.2];
    let mut p = SystemParams::new(10.0, beta, 6);
    p.snr_th = 1e-12;
    assert!(outage_closed_form(&p, &TAU6).unwrap() < 1e-20);
    p.snr_th = 1e6;
    assert!((outage_closed_form(&p, &TAU6).unwrap() - 1.0).abs() < 1e-12);
    p.snr_th = 10f64.powf(-0.3);
    let closed = outage_closed_form(&p, &TAU6).unwrap();
    let quad = outage_quadrature(&p, &TAU6).unwrap();
    assert!((closed - quad).abs() < 1e-9, "{closed} vs {quad}");
}

#[test]
fn ser_limits_and_monotonicity() {
    let mut p = SystemParams::new(1e-14, vec![1.0, 1.0], 6);
    assert!((ser_closed_form(&p, &TAU6).unwrap() - 1.0).abs() < 1e-6);
    let mut last = f64::INFINITY;
    for i in 0..10 {
        p.snr_ut = 10f64.powf(-2.0 + 0.3 * i as f64);
        let s = ser_closed_form(&p, &TAU6).unwrap();
        assert!(s < last);
        last = s;
    }
}

#[test]
fn ser_matches_eigenvalue_monte_carlo() {
    let mut rng = seeded(404);
    let b = product_with_spectrum(&TAU6, 6, &mut rng);
    let c = DMatrix::identity(6, 6);
    let scn = Scenario::from_matrices(c, b, vec![0.02, 0.05], 2.0).unwrap();
    let p = SystemParams::new(2.0, vec![0.02, 0.05], 6);
    let closed = ser_closed_form(&p, &TAU6).unwrap();
    let mc = mc_ser(&scn, &[Modulation::QPSK; 2], SnrModel::Eigenvalue, 20_000, 5).unwrap();
    assert!(closed > 1e-3);
    assert!((closed - mc.value).abs() < 3.0 * mc.std_error, "{closed} vs {} ± {}", mc.value, mc.std_error);
}

#[test]
fn rate_bound_single_user_reduction() {
    let tau = [0.4, 1.0, 2.5];
    let d = SingleUserDensity::new(&tau).unwrap();
    let inv =
        integrate_to_infinity(|x| if x > 0.0 { d.pdf(x).unwrap() / x } else { 0.0 }, 0.0, 1e-14, 1e-12).unwrap().value;
    let p = SystemParams::new(30.0, vec![0.3], 3);
    let r = rate_lower_bound(&p, &tau).unwrap();
    assert!((r[0] - (1.0 + 30.0 * 0.3 / inv).log2()).abs() < 1e-8);
}

#[test]
fn rate_bound_high_snr_slope() {
    let mut p = SystemParams::new(1000.0, vec![1.0, 0.5], 6);
    let low = rate_lower_bound(&p, &TAU6).unwrap();
    p.snr_ut *= 2.0;
    let high = rate_lower_bound(&p, &TAU6).unwrap();
    for (a, b) in low.iter().zip(&high) {
        assert!((b - a - 1.0).abs() < 0.1);
    }
}

#[test]
fn perturbation_stability() {
    let p = SystemParams::new(3.0, vec![0.1, 0.3], 6);
    let base = [
        rate_lower_bound(&p, &TAU6).unwrap()[0],
        ser_closed_form(&p, &TAU6).unwrap(),
        outage_closed_form(&p, &TAU6).unwrap(),
        expected_xi_single(&TAU6).unwrap(),
    ];
    let bumped: Vec<f64> =
        TAU6.iter().enumerate().map(|(i, t)| t * (1.0 + if i % 2 == 0 { 1e-6 } else { -1e-6 })).collect();
    let moved = [
        rate_lower_bound(&p, &bumped).unwrap()[0],
        ser_closed_form(&p, &bumped).unwrap(),
        outage_closed_form(&p, &bumped).unwrap(),
        expected_xi_single(&bumped).unwrap(),
    ];
    for (a, b) in base.iter().zip(&moved) {
        assert!((a - b).abs() < 1e-3 * a.abs(), "{a} vs {b}");
    }
}

#[test]
fn gain_matches_monte_carlo() {
    let mut rng = seeded(505);
    let tau = [0.3, 1.1, 2.2, 3.7];
    let tau_hat = [0.6, 1.8];
    let b = product_with_spectrum(&tau, 6, &mut rng);
    let b_hat = product_with_spectrum(&tau_hat, 6, &mut rng);
    let scn = Scenario::from_matrices(DMatrix::identity(4, 4), b, vec![0.5], 10.0).unwrap();
    let reference = Scenario::from_matrices(DMatrix::identity(2, 2), b_hat, vec![0.5], 10.0).unwrap();
    let closed = ergodic_gain(&SpectrumPair { tau: tau.to_vec(), tau_hat: tau_hat.to_vec() }, 10.0, 0.5).unwrap();
    let mc = mc_gain(&scn, &reference, 100_000, 17).unwrap();
    assert!((mc.value / closed - 1.0).abs() < 0.01, "{closed} vs {}", mc.value);
}

#[test]
fn asymptotic_identities() {
    let (m, pp) = (5, 7);
    let a = DMatrix::from_fn(m, pp, |i, q| Complex64::from_polar(1.0, 0.37 * (i * q) as f64));
    let c = DMatrix::<Complex64>::identity(m, m);
    assert!((asymptotic_snr(&a, &c, 2.0, 0.5) - (m * pp) as f64).abs() < 1e-9);
    let c2 = &c * Complex64::new(0.0, 3.0);
    assert!((asymptotic_snr(&a, &c2, 2.0, 0.5) - 9.0 * (m * pp) as f64).abs() < 1e-8);

    let ones = DMatrix::from_element(m, pp, Complex64::new(1.0, 0.0));
    let p1 = SystemParams::new(4.0, vec![0.25], m);
    assert!((asymptotic_rate(&p1, &ones, &c) - (1.0 + (m * pp) as f64).log2()).abs() < 1e-12);
    let p3 = SystemParams::new(4.0, vec![0.25; 3], m);
    assert!((asymptotic_rate(&p3, &ones, &c) - 3.0 * asymptotic_rate(&p1, &ones, &c)).abs() < 1e-12);

    let p0 = SystemParams::new(0.0, vec![1.0, 1.0], m);
    assert_eq!(asymptotic_ser(&p0, &a, &c), 1.0);
    assert!(asymptotic_ser_from_trace(&p1, 1e6) < 1e-100);

    let a_hat = a.rows(0, 2).into_owned();
    let c_hat = DMatrix::<Complex64>::identity(2, 2);
    assert_eq!(asymptotic_gain(&a, &c, &a, &c, 3.0, 0.2), 0.0);
    let g = asymptotic_gain(&a, &c, &a_hat, &c_hat, 3.0, 0.2);
    assert!((g - 3.0 * 0.2 * (pp * (m - 2)) as f64).abs() < 1e-9);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn spectrum() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.05f64..20.0, 3..9).prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            prepare_spectrum(&v).unwrap().tau
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn density_is_a_probability(tau in spectrum(), k_frac in 0.0f64..1.0) {
            let k = 1 + ((tau.len() - 1) as f64 * k_frac) as usize;
            let k = k.min(tau.len() - 1);
            let d = EigenDensity::new(&tau, k).unwrap();
            prop_assert!((d.normalization() - 1.0).abs() < 1e-9);
            prop_assert!((d.mean() - tau.iter().sum::<f64>()).abs() < 1e-8 * tau.iter().sum::<f64>());
            let hi = d.support_end();
            let mut last = 0.0;
            for i in 1..=50 {
                let y = hi * (i as f64 / 50.0).powi(2);
                prop_assert!(d.pdf(y).unwrap() >= 0.0);
                let c = d.cdf(y);
                prop_assert!(c >= last - 1e-12 && c <= 1.0 + 1e-9);
                last = c;
            }
            prop_assert!(d.mean_inverse_sum() > 0.0);
        }

        #[test]
        fn prepared_spectra_pass_the_strict_check(raw in prop::collection::vec(0.0f64..1.0, 2..30), dup in 0usize..5) {
            let mut v = raw.clone();
            for i in 0..dup.min(v.len()) {
                v.push(v[i]);
            }
            if v.iter().any(|&t| t > 0.0) {
                let p = prepare_spectrum(&v).unwrap();
                prop_assert!(check_spectrum(&p.tau).is_ok());
                prop_assert_eq!(p.tau.len() + p.dropped, v.len());
            }
        }
    }
}
