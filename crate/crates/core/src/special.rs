//! Scalar special functions used by the impedance and error-rate formulas.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument Si and Ci use their power series; above it, the
/// continued fraction for E1(ix).
pub const SERIES_CROSSOVER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnEvaluation {
    pub argument: f64,
    pub value: f64,
    pub abs_error_bound: f64,
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(invalid(format!("non-finite argument {x}")));
    }
    Ok(())
}

/// Si(x) and Ci(x) - γ - ln x, both by power series.
fn series(x: f64) -> (f64, f64, f64) {
    let x2 = x * x;
    let mut si = 0.0;
    let mut cin = 0.0;
    let mut fact_term = x; // x^(2k+1)/(2k+1)!
    let mut even_term = 1.0; // x^(2k)/(2k)!
    let mut bound: f64 = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let s = sign * fact_term / (2.0 * kf + 1.0);
        si += s;
        if k > 0 {
            let c = sign * even_term / (2.0 * kf);
            cin += c;
            bound = bound.max(c.abs());
        }
        bound = bound.max(s.abs());
        even_term *= x2 / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        fact_term *= x2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        if fact_term < 1e-18 * si.abs().max(1e-300) && even_term < 1e-18 {
            break;
        }
    }
    (si, cin, 4.0 * f64::EPSILON * bound.max(1.0))
}

/// Si(x) and Ci(x) via the modified Lentz evaluation of E1(ix).
fn continued_fraction(x: f64) -> (f64, f64, f64) {
    use num_complex::Complex64 as C;
    let tiny = 1e-300;
    let mut b = C::new(1.0, x);
    let mut c = C::new(1.0 / tiny, 0.0);
    let mut d = C::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..10_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = C::new(1.0, 0.0) / (d * a + b);
        c = b + C::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let h = h * C::new(x.cos(), -x.sin());
    let ci = -h.re;
    let si = std::f64::consts::FRAC_PI_2 + h.im;
    (si, ci, 8.0 * f64::EPSILON)
}

pub fn sine_integral_eval(x: f64) -> Result<FnEvaluation> {
    check_arg(x)?;
    if x < 0.0 {
        return Err(invalid(format!("Si requires x >= 0, got {x}")));
    }
    let (value, bound) = if x == 0.0 {
        (0.0, 0.0)
    } else if x <= SERIES_CROSSOVER {
        let (si, _, b) = series(x);
        (si, b)
    } else {
        let (si, _, b) = continued_fraction(x);
        (si, b)
    };
    Ok(FnEvaluation { argument: x, value, abs_error_bound: bound })
}

pub fn cosine_integral_eval(x: f64) -> Result<FnEvaluation> {
    check_arg(x)?;
    if x <= 0.0 {
        return Err(invalid(format!("Ci requires x > 0, got {x}")));
    }
    let (value, bound) = if x <= SERIES_CROSSOVER {
        let (_, cin, b) = series(x);
        (EULER_GAMMA + x.ln() + cin, b + f64::EPSILON * x.ln().abs())
    } else {
        let (_, ci, b) = continued_fraction(x);
        (ci, b)
    };
    Ok(FnEvaluation { argument: x, value, abs_error_bound: bound })
}

/// Sine integral ∫₀^x sin t / t dt.
pub fn sine_integral(x: f64) -> Result<f64> {
    sine_integral_eval(x).map(|e| e.value)
}

/// Cosine integral γ + ln x + ∫₀^x (cos t − 1)/t dt.
pub fn cosine_integral(x: f64) -> Result<f64> {
    cosine_integral_eval(x).map(|e| e.value)
}

const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_21e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const ERF_B: [f64; 4] =
    [2.360_129_095_234_412_09e1, 2.440_246_379_344_441_73e2, 1.282_616_526_077_372_28e3, 2.844_236_833_439_170_62e3];
const ERF_C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_90e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const ERF_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];
const ERF_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const ERF_Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_467_25e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

/// erf on |x| ≤ 0.46875.
fn erf_small(x: f64) -> f64 {
    let ysq = x * x;
    let mut num = ERF_A[4] * ysq;
    let mut den = ysq;
    for i in 0..3 {
        num = (num + ERF_A[i]) * ysq;
        den = (den + ERF_B[i]) * ysq;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// erfc on y > 0.46875 (rational Chebyshev approximations after W. J. Cody).
fn erfc_positive(y: f64) -> f64 {
    if y >= 26.55 {
        return 0.0;
    }
    let r = if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = ERF_P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + ERF_P[i]) * ysq;
            den = (den + ERF_Q[i]) * ysq;
        }
        let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (0.564_189_583_547_756_286_95 - r) / y
    };
    // Split y² so that exp(-y²) keeps full relative accuracy.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

pub fn erfc(x: f64) -> Result<f64> {
    check_arg(x)?;
    let y = x.abs();
    if y <= 0.468_75 {
        return Ok(1.0 - erf_small(x));
    }
    let r = erfc_positive(y);
    Ok(if x < 0.0 { 2.0 - r } else { r })
}

pub fn erf(x: f64) -> Result<f64> {
    check_arg(x)?;
    let y = x.abs();
    if y <= 0.468_75 {
        return Ok(erf_small(x));
    }
    let r = 1.0 - erfc_positive(y);
    Ok(if x < 0.0 { -r } else { r })
}

/// Gaussian tail probability Q(x) = erfc(x/√2)/2.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2).unwrap_or(f64::NAN)
}

pub fn ln_gamma(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= 0.0 {
        return Err(invalid(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

pub fn gamma(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= 0.0 {
        return Err(invalid(format!("gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// Draws 10^(X/10) with X ~ N(0, sigma_db²).
pub fn lognormal_shadowing<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> Result<f64> {
    if !(sigma_db >= 0.0) || !sigma_db.is_finite() {
        return Err(invalid(format!("sigma_dB must be >= 0, got {sigma_db}")));
    }
    if sigma_db == 0.0 {
        return Ok(1.0);
    }
    let normal = Normal::new(0.0, sigma_db).map_err(|e| invalid(e.to_string()))?;
    let x: f64 = normal.sample(rng);
    Ok(10f64.powf(x / 10.0))
}

pub fn sample_lognormal_shadowing(sigma_db: f64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lognormal_shadowing(sigma_db, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn si_ci_reference_values() {
        assert_eq!(sine_integral(0.0).unwrap(), 0.0);
        assert!((sine_integral(1.0).unwrap() - 0.946_083_070_367_183).abs() < 1e-13);
        assert!((cosine_integral(1.0).unwrap() - 0.337_403_922_900_968_1).abs() < 1e-13);
        assert!((sine_integral(100.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 0.01);
        let ci100 = cosine_integral(100.0).unwrap();
        assert!(ci100.abs() < 0.01);
        let x = 1e-4;
        assert!((cosine_integral(x).unwrap() - (EULER_GAMMA + x.ln())).abs() < 1e-8);
    }

    #[test]
    fn branches_agree_at_crossover() {
        let x = SERIES_CROSSOVER;
        let (s1, c1, _) = series(x);
        let (s2, c2, _) = continued_fraction(x);
        assert!((s1 - s2).abs() < 1e-13);
        assert!((EULER_GAMMA + x.ln() + c1 - c2).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(sine_integral(-1.0).is_err());
        assert!(sine_integral(f64::NAN).is_err());
        assert!(cosine_integral(0.0).is_err());
        assert!(ln_gamma(0.0).is_err());
        assert!(erfc(f64::INFINITY).is_err());
    }

    #[test]
    fn erfc_identities() {
        assert_eq!(erfc(0.0).unwrap(), 1.0);
        let x = 0.7;
        assert!((erfc(-x).unwrap() - (2.0 - erfc(x).unwrap())).abs() < 1e-15);
        let oracle = 2.0 / std::f64::consts::PI.sqrt()
            * crate::quadrature::integrate_to_infinity(|t: f64| (-t * t).exp(), 1.0, 1e-16, 1e-15).unwrap().value;
        assert!((erfc(1.0).unwrap() - oracle).abs() < 1e-12 * oracle, "{} vs {}", erfc(1.0).unwrap(), oracle);
        assert!((erfc(1.0).unwrap() - 0.157_299_207_050_285_1).abs() < 1e-13);
        for i in 0..100 {
            let x = -3.0 + 0.06 * i as f64;
            assert!((erf(x).unwrap() + erfc(x).unwrap() - 1.0).abs() < 4.0 * f64::EPSILON);
            assert!(erfc(x + 0.06).unwrap() < erfc(x).unwrap());
        }
    }

    #[test]
    fn erfc_matches_high_precision_values() {
        let table = [
            (-3.0, 1.999_977_909_503_001_414_6),
            (-1.5, 1.966_105_146_475_310_727_1),
            (-0.3, 1.328_626_759_459_127_416_2),
            (0.1, 0.887_537_083_981_715_101_6),
            (0.468_75, 0.507_386_526_782_062_008_41),
            (0.5, 0.479_500_122_186_953_462_32),
            (2.0, 0.004_677_734_981_047_265_837_9),
            (3.9, 3.479_224_859_723_176_712_9e-8),
            (4.1, 6.700_027_654_084_918_441_7e-9),
            (6.0, 2.151_973_671_249_891_311_7e-17),
            (10.0, 2.088_487_583_762_544_757e-45),
            (20.0, 5.395_865_611_607_900_928_9e-176),
        ];
        for (x, want) in table {
            let got = erfc(x).unwrap();
            assert!((got - want).abs() <= 1e-13 * want, "erfc({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_recurrence() {
        for i in 0..=495 {
            let x = 0.5 + 0.1 * i as f64;
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn ln_gamma_by_recurrence_oracle() {
        // Γ(10.3) = Γ(1.3) · Π_{k=1}^{9} (k + 0.3); Γ(1.3) from quadrature of t^0.3 e^-t.
        let base = crate::quadrature::integrate_to_infinity(|t: f64| t.powf(0.3) * (-t).exp(), 0.0, 1e-15, 1e-14)
            .unwrap()
            .value;
        let mut expected = base.ln();
        for k in 1..=9 {
            expected += (k as f64 + 0.3).ln();
        }
        let got = ln_gamma(10.3).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected.abs(), "{got} vs {expected}");
    }

    #[test]
    fn shadowing_statistics() {
        assert_eq!(sample_lognormal_shadowing(0.0, 3).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let db: Vec<f64> = (0..n).map(|_| 10.0 * lognormal_shadowing(8.0, &mut rng).unwrap().log10()).collect();
        let mean = db.iter().sum::<f64>() / n as f64;
        let var = db.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = var.sqrt() / (n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se);
        assert!((var.sqrt() - 8.0).abs() < 0.1);
        assert_eq!(sample_lognormal_shadowing(8.0, 5).unwrap(), sample_lognormal_shadowing(8.0, 5).unwrap());
    }
}
