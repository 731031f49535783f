//! Closed-form performance results conditioned on the correlation spectrum:
//! ergodic received gain, ZF rate lower bound, average SER, outage
//! probability, and their large-array limits.

mod kernel;
mod mp;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use kernel::OutageExponent;
use kernel::{verified, MultiKernel, SingleKernel};

use crate::channel::gram_trace;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_with_breaks, Integral};
use crate::special::erfc;

/// Minimum relative gap between consecutive eigenvalues (relative to τ_M).
pub const DELTA_MIN: f64 = 1e-6;
/// Eigenvalues below this fraction of τ_M are treated as structural zeros and dropped.
pub const DROP_BELOW: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub omega: f64,
    pub varpi: f64,
}

impl Modulation {
    pub const QPSK: Modulation = Modulation { omega: 2.0, varpi: 0.5 };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Transmit SNR of each UT, linear.
    pub snr_ut: f64,
    pub k: usize,
    /// Large-scale factors β_k, linear.
    pub beta: Vec<f64>,
    pub m: usize,
    /// Outage threshold, linear.
    pub snr_th: f64,
    pub modulation: Vec<Modulation>,
}

impl SystemParams {
    /// QPSK users and a −3 dB outage threshold.
    pub fn new(snr_ut: f64, beta: Vec<f64>, m: usize) -> Self {
        let k = beta.len();
        SystemParams { snr_ut, k, beta, m, snr_th: 10f64.powf(-0.3), modulation: vec![Modulation::QPSK; k] }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr_ut > 0.0) || !self.snr_ut.is_finite() {
            return Err(invalid(format!("SNR_UT must be positive, got {}", self.snr_ut)));
        }
        if self.k == 0 || self.beta.len() != self.k || self.modulation.len() != self.k {
            return Err(invalid("need K >= 1 with one β and one modulation per UT"));
        }
        if self.m <= self.k {
            return Err(invalid(format!("need M > K, got M={} K={}", self.m, self.k)));
        }
        if self.beta.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
            return Err(invalid("β_k must be positive"));
        }
        if !(self.snr_th >= 0.0) {
            return Err(invalid("SNR_th must be non-negative"));
        }
        Ok(())
    }
}

/// Spectra of the operating configuration (M, R) and the reference (M_min, R_min).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPair {
    pub tau: Vec<f64>,
    pub tau_hat: Vec<f64>,
}

/// A spectrum made admissible for the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSpectrum {
    pub tau: Vec<f64>,
    /// Eigenvalues dropped as (numerically) zero.
    pub dropped: usize,
    /// Eigenvalues moved to enforce the minimum gap.
    pub perturbed: usize,
}

/// Clamps negatives, drops eigenvalues below `DROP_BELOW·τ_M`, and spreads
/// clusters symmetrically so consecutive gaps are at least `DELTA_MIN·τ_M`.
pub fn prepare_spectrum(tau: &[f64]) -> Result<PreparedSpectrum> {
    if tau.iter().any(|t| !t.is_finite()) {
        return Err(Error::NumericFailure("non-finite eigenvalue".into()));
    }
    let mut v: Vec<f64> = tau.iter().map(|&t| t.max(0.0)).collect();
    v.sort_by(f64::total_cmp);
    let top = v.last().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(invalid("spectrum has no positive eigenvalue"));
    }
    let before = v.len();
    v.retain(|&t| t >= DROP_BELOW * top);
    let dropped = before - v.len();
    // Small margin so the spread spectrum passes `check_spectrum` after rounding.
    let gap = DELTA_MIN * top * (1.0 + 1e-6);
    let floor = v[0].min(gap);
    // Blocks of (sum, count); each block is laid out symmetrically about its
    // mean with spacing `gap`, but never below min(τ₁, gap).
    let low = |sum: f64, count: usize| (sum / count as f64 - 0.5 * (count as f64 - 1.0) * gap).max(floor);
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &t in &v {
        blocks.push((t, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 2];
            let (s2, c2) = blocks[blocks.len() - 1];
            if low(s1, c1) + c1 as f64 * gap <= low(s2, c2) * (1.0 + 1e-12) {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
        }
    }
    let original = v.clone();
    v.clear();
    for (sum, count) in blocks {
        if count == 1 {
            v.push(sum);
        } else {
            let start = low(sum, count);
            v.extend((0..count).map(|j| start + j as f64 * gap));
        }
    }
    let perturbed = v.iter().zip(&original).filter(|(a, b)| a != b).count();
    Ok(PreparedSpectrum { tau: v, dropped, perturbed })
}

/// Validates a spectrum for direct use: positive, finite, gaps ≥ `DELTA_MIN·τ_M`.
/// Returns it sorted ascending.
pub fn check_spectrum(tau: &[f64]) -> Result<Vec<f64>> {
    let mut v = tau.to_vec();
    if v.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::Degeneracy("eigenvalues must be finite and positive".into()));
    }
    v.sort_by(f64::total_cmp);
    let top = *v.last().ok_or_else(|| invalid("empty spectrum"))?;
    for w in v.windows(2) {
        if w[1] - w[0] < DELTA_MIN * top * (1.0 - 1e-9) {
            return Err(Error::Degeneracy(format!("gap {:.3e} between {} and {}", w[1] - w[0], w[0], w[1])));
        }
    }
    Ok(v)
}

fn density_guard(v: f64, scale: f64) -> Result<f64> {
    if !v.is_finite() || v < -1e-9 * scale {
        return Err(Error::NumericFailure(format!("density evaluated to {v:.3e}")));
    }
    Ok(v.max(0.0))
}

/// Density of ξ₁ = h₁ᴴ Σ h₁ (single user) given the spectrum.
#[derive(Debug, Clone)]
pub struct SingleUserDensity {
    kernel: SingleKernel,
    scale: f64,
}

impl SingleUserDensity {
    pub fn new(tau: &[f64]) -> Result<Self> {
        let tau = check_spectrum(tau)?;
        if tau.len() < 2 {
            return Err(invalid("single-user density needs M >= 2"));
        }
        let total: f64 = tau.iter().sum();
        let probes = [0.05, 0.3, 1.0, 2.5, 6.0];
        let kernel = verified(
            |p| SingleKernel::build(&tau, p),
            |k| {
                let mut v = vec![(k.normalization() / tau[tau.len() - 1].powi(0), 1.0), (k.mean() / total, 1.0)];
                v.extend(probes.iter().map(|&f| (k.pdf(f * total) * total, 1.0)));
                v
            },
        )?;
        let norm = kernel.normalization();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NumericFailure(format!("single-user density integrates to {norm}")));
        }
        Ok(SingleUserDensity { kernel, scale: 1.0 / total })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        density_guard(self.kernel.pdf(x), self.scale)
    }

    /// E[ξ₁].
    pub fn mean(&self) -> f64 {
        self.kernel.mean()
    }

    pub fn precision_bits(&self) -> u32 {
        self.kernel.prec
    }
}

/// Density of an unordered eigenvalue of Hᴴ Σ H with K users.
#[derive(Debug, Clone)]
pub struct EigenDensity {
    kernel: MultiKernel,
    total: f64,
    tau_max: f64,
}

impl EigenDensity {
    pub fn new(tau: &[f64], k: usize) -> Result<Self> {
        let tau = check_spectrum(tau)?;
        if k == 0 || tau.len() <= k {
            return Err(invalid(format!("need M > K >= 1, got M={} K={k}", tau.len())));
        }
        let total: f64 = tau.iter().sum();
        let probes = [0.05, 0.3, 1.0, 2.5, 6.0];
        let kernel = verified(
            |p| MultiKernel::build(&tau, k, p),
            |kr| {
                let mut v = vec![(kr.normalization(), 1.0), (kr.mean_inverse_sum(false) * total, k as f64)];
                for &f in &probes {
                    v.push((kr.pdf(f * total) * total, 1.0));
                    v.push((kr.cdf(f * total, OutageExponent::Corrected), 1.0));
                }
                v
            },
        )?;
        let norm = kernel.normalization();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NumericFailure(format!("eigenvalue density integrates to {norm}")));
        }
        Ok(EigenDensity { kernel, total, tau_max: tau[tau.len() - 1] })
    }

    pub fn k(&self) -> usize {
        self.kernel.k
    }

    pub fn m(&self) -> usize {
        self.kernel.node_count()
    }

    pub fn precision_bits(&self) -> u32 {
        self.kernel.prec
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        density_guard(self.kernel.pdf(x), 1.0 / self.total)
    }

    /// Value of ∫ f computed from the closed-form coefficients.
    pub fn normalization(&self) -> f64 {
        self.kernel.normalization()
    }

    pub fn mean(&self) -> f64 {
        self.kernel.mean()
    }

    /// E[Σ_i 1/ξ_i].
    pub fn mean_inverse_sum(&self) -> f64 {
        self.kernel.mean_inverse_sum(false)
    }

    /// The same expectation with the logarithmic term summed over all K
    /// cofactor columns; kept to document that this reading disagrees with quadrature.
    pub fn mean_inverse_sum_all_columns(&self) -> f64 {
        self.kernel.mean_inverse_sum(true)
    }

    /// P(ξ ≤ y) from the closed incomplete-Gamma terms.
    pub fn cdf(&self, y: f64) -> f64 {
        self.kernel.cdf(y, OutageExponent::Corrected)
    }

    pub fn cdf_with(&self, y: f64, exponent: OutageExponent) -> f64 {
        self.kernel.cdf(y, exponent)
    }

    /// Upper limit beyond which the density is negligible.
    pub fn support_end(&self) -> f64 {
        2.0 * self.total + (60.0 + 2.0 * self.kernel.k as f64) * self.tau_max
    }

    /// Geometric breakpoints covering the bulk of the distribution.
    pub fn breakpoints(&self, upper: f64) -> Vec<f64> {
        let mut b = vec![0.0];
        let mut x = self.total * 1e-6;
        while x < upper {
            b.push(x);
            x *= 2.0;
        }
        b.push(upper);
        b
    }

    /// ∫₀^upper g(x) f(x) dx by adaptive quadrature.
    pub fn integrate_against<G: Fn(f64) -> f64>(
        &self,
        g: G,
        upper: f64,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<Integral> {
        let breaks = self.breakpoints(upper.min(self.support_end()));
        let mut failure = None;
        let r = integrate_with_breaks(
            |x| match self.pdf(x) {
                Ok(f) => g(x) * f,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            &breaks,
            abs_tol,
            rel_tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        r
    }
}

/// Single-user density of ξ₁ at `x`.
pub fn xi_pdf_single(x: f64, tau: &[f64]) -> Result<f64> {
    SingleUserDensity::new(tau)?.pdf(x)
}

/// Marginal density of an unordered eigenvalue for K users at `x`.
pub fn xi_pdf_multi(x: f64, tau: &[f64], k: usize) -> Result<f64> {
    EigenDensity::new(tau, k)?.pdf(x)
}

/// E[ξ₁] for a single user.
pub fn expected_xi_single(tau: &[f64]) -> Result<f64> {
    Ok(SingleUserDensity::new(tau)?.mean())
}

/// Ergodic received gain SNR_UT·β₁·(E[ξ₁] − E[ξ_min]).
pub fn ergodic_gain(pair: &SpectrumPair, snr_ut: f64, beta_1: f64) -> Result<f64> {
    if pair.tau == pair.tau_hat {
        check_spectrum(&pair.tau)?;
        return Ok(0.0);
    }
    let e = expected_xi_single(&pair.tau)?;
    let e_min = expected_xi_single(&pair.tau_hat)?;
    Ok(snr_ut * beta_1 * (e - e_min))
}

/// Per-UT ZF rate lower bound log₂(1 + SNR_UT·K·β_k / E[Σ 1/ξ_i]).
pub fn rate_lower_bound(params: &SystemParams, tau: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let density = EigenDensity::new(tau, params.k)?;
    rate_lower_bound_with(params, &density)
}

pub fn rate_lower_bound_with(params: &SystemParams, density: &EigenDensity) -> Result<Vec<f64>> {
    let inv = density.mean_inverse_sum();
    if !(inv > 0.0) || !inv.is_finite() {
        return Err(Error::NumericFailure(format!("E[Σ 1/ξ] evaluated to {inv}")));
    }
    Ok(params.beta.iter().map(|&b| (1.0 + params.snr_ut * params.k as f64 * b / inv).log2()).collect())
}

/// Average SER of the K users, integrating erfc against the eigenvalue density.
pub fn ser_closed_form(params: &SystemParams, tau: &[f64]) -> Result<f64> {
    params.validate()?;
    let density = EigenDensity::new(tau, params.k)?;
    ser_closed_form_with(params, &density)
}

pub fn ser_closed_form_with(params: &SystemParams, density: &EigenDensity) -> Result<f64> {
    let kf = params.k as f64;
    let weight = |x: f64| {
        params
            .beta
            .iter()
            .zip(&params.modulation)
            .map(|(&b, md)| 0.5 * md.omega * erfc((md.varpi * params.snr_ut * b * x).sqrt()).unwrap_or(0.0))
            .sum::<f64>()
            / kf
    };
    let r = density.integrate_against(weight, density.support_end(), 1e-13, 1e-9)?;
    Ok(r.value.max(0.0))
}

fn outage_thresholds(params: &SystemParams) -> Vec<f64> {
    params.beta.iter().map(|&b| params.snr_th / (params.snr_ut * b)).collect()
}

/// Average outage probability from the closed incomplete-Gamma terms.
pub fn outage_closed_form(params: &SystemParams, tau: &[f64]) -> Result<f64> {
    outage_closed_form_exponent(params, tau, OutageExponent::Corrected)
}

pub fn outage_closed_form_exponent(params: &SystemParams, tau: &[f64], exponent: OutageExponent) -> Result<f64> {
    params.validate()?;
    let density = EigenDensity::new(tau, params.k)?;
    Ok(outage_closed_form_with(params, &density, exponent))
}

pub fn outage_closed_form_with(params: &SystemParams, density: &EigenDensity, exponent: OutageExponent) -> f64 {
    let ys = outage_thresholds(params);
    ys.iter().map(|&y| density.cdf_with(y, exponent)).sum::<f64>() / params.k as f64
}

/// Average outage probability by quadrature of the density up to each threshold.
pub fn outage_quadrature(params: &SystemParams, tau: &[f64]) -> Result<f64> {
    params.validate()?;
    let density = EigenDensity::new(tau, params.k)?;
    outage_quadrature_with(params, &density)
}

pub fn outage_quadrature_with(params: &SystemParams, density: &EigenDensity) -> Result<f64> {
    let mut total = 0.0;
    for y in outage_thresholds(params) {
        if y <= 0.0 {
            continue;
        }
        let upper = y.min(density.support_end());
        total += density.integrate_against(|_| 1.0, upper, 1e-14, 1e-11)?.value;
    }
    Ok(total / params.k as f64)
}

/// Large-array received SNR SNR_UT·β_k·Tr(Aᴴ Cᴴ C A).
pub fn asymptotic_snr(a: &DMatrix<Complex64>, c: &DMatrix<Complex64>, snr_ut: f64, beta_k: f64) -> f64 {
    snr_ut * beta_k * gram_trace(c, a)
}

/// Σ_k log₂(1 + SNR_UT β_k T) for a given trace T.
pub fn asymptotic_rate_from_trace(params: &SystemParams, trace: f64) -> f64 {
    params.beta.iter().map(|&b| (1.0 + params.snr_ut * b * trace).log2()).sum()
}

pub fn asymptotic_rate(params: &SystemParams, a: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> f64 {
    asymptotic_rate_from_trace(params, gram_trace(c, a))
}

pub fn asymptotic_ser_from_trace(params: &SystemParams, trace: f64) -> f64 {
    let kf = params.k as f64;
    params
        .beta
        .iter()
        .zip(&params.modulation)
        .map(|(&b, md)| 0.5 * md.omega * erfc((md.varpi * params.snr_ut * b * trace).sqrt()).unwrap_or(0.0))
        .sum::<f64>()
        / kf
}

pub fn asymptotic_ser(params: &SystemParams, a: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> f64 {
    asymptotic_ser_from_trace(params, gram_trace(c, a))
}

/// SNR_UT β₁ [Tr(AᴴCᴴCA) − Tr(ÂᴴĈᴴĈÂ)].
pub fn asymptotic_gain(
    a: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
    a_hat: &DMatrix<Complex64>,
    c_hat: &DMatrix<Complex64>,
    snr_ut: f64,
    beta_1: f64,
) -> f64 {
    snr_ut * beta_1 * (gram_trace(c, a) - gram_trace(c_hat, a_hat))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU6: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 6.0, 9.0];

    #[test]
    fn k1_mean_is_trace() {
        assert!((expected_xi_single(&[1.0, 3.0]).unwrap() - 4.0).abs() < 1e-12);
        let tau = [0.3, 1.1, 2.0, 7.5, 9.0];
        assert!((expected_xi_single(&tau).unwrap() - tau.iter().sum::<f64>()).abs() < 1e-11);
    }

    #[test]
    fn gain_is_zero_for_identical_configs() {
        let pair = SpectrumPair { tau: TAU6.to_vec(), tau_hat: TAU6.to_vec() };
        assert_eq!(ergodic_gain(&pair, 10.0, 0.5).unwrap(), 0.0);
        let pair = SpectrumPair { tau: TAU6.to_vec(), tau_hat: vec![1.0, 3.0] };
        assert!((ergodic_gain(&pair, 2.0, 0.5).unwrap() - (25.0 - 4.0)).abs() < 1e-10);
    }

    #[test]
    fn mean_inverse_matches_reference() {
        let d = EigenDensity::new(&TAU6, 2).unwrap();
        assert!((d.normalization() - 1.0).abs() < 1e-12);
        assert!((d.mean_inverse_sum() - 0.137_677_979_463_0).abs() < 1e-11);
        assert!((d.mean_inverse_sum_all_columns() - 0.137_677_979_463_0).abs() > 1e-3);
    }

    #[test]
    fn outage_exponent_reading() {
        let d = EigenDensity::new(&TAU6, 2).unwrap();
        assert!((d.cdf(3.0) - 0.005_861_814_9).abs() < 1e-9);
        assert!((d.cdf_with(3.0, OutageExponent::AsPrinted) - d.cdf(3.0)).abs() > 0.5);
    }

    #[test]
    fn degenerate_spectra_rejected_and_repaired() {
        assert!(matches!(EigenDensity::new(&[1.0, 1.0, 2.0], 1), Err(Error::Degeneracy(_))));
        assert!(matches!(SingleUserDensity::new(&[0.0, 1.0, 2.0]), Err(Error::Degeneracy(_))));
        let p = prepare_spectrum(&[-1e-14, 0.0, 1e-13, 1.0, 1.0, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(p.dropped, 3);
        assert_eq!(p.tau.len(), 5);
        assert!(check_spectrum(&p.tau).is_ok());
        assert_eq!(p.perturbed, 2);
        assert!((p.tau[1] - 1.0).abs() < 1e-10 && (p.tau[0] - (1.0 - 5e-6)).abs() < 1e-10);
    }

    #[test]
    fn system_param_validation() {
        let mut p = SystemParams::new(10.0, vec![1.0, 1.0], 2);
        assert!(p.validate().is_err());
        p.m = 3;
        assert!(p.validate().is_ok());
        p.beta[0] = 0.0;
        assert!(p.validate().is_err());
    }
}
