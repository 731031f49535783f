//! Seeded Monte Carlo over small-scale fading with a frozen array, coupling,
//! steering and large-scale configuration.
//!
//! Trial `t` draws from its own ChaCha stream keyed by (seed, t), trials are
//! collected in index order and reduced by pairwise summation, so estimates do
//! not depend on the number of worker threads.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    complex_gaussian, draw_small_scale_with, hermitian_eigenvalues, steering_matrix, IncidentDirections,
};
use crate::closed_form::Modulation;
use crate::coupling::{coupling_for_layout, CouplingParams};
use crate::error::{invalid, Error, Result};
use crate::geometry::{sample_bpp, AntennaLayout};
use crate::rng::{derive_seed, fnv1a64, trial_rng};
use crate::special::erfc;

pub const MIN_TRIALS: usize = 100;
/// Redraws allowed per trial slot when the channel Gram matrix is singular.
pub const RESAMPLE_CAP: usize = 10;
/// Gram matrices whose Cholesky pivots spread more than this are treated as singular.
const GRAM_PIVOT_RATIO: f64 = 1e-14;

/// How the per-UT received SNR of one realization is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrModel {
    /// SNR_UT / [(GᴴG)⁻¹]_kk.
    #[default]
    ZeroForcing,
    /// Matched filter with inter-user interference.
    Mrc,
    /// SNR_UT β_k ξ with ξ an unordered eigenvalue of Hᴴ Aᴴ Cᴴ C A H. Every
    /// trial averages over all K eigenvalues.
    Eigenvalue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
    pub config_digest: u64,
}

impl MetricEstimate {
    pub fn from_samples(values: &[f64], seed: u64, config_digest: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("no trials"));
        }
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if values.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        if !mean.is_finite() || !var.is_finite() {
            return Err(Error::NumericFailure("non-finite Monte Carlo estimate".into()));
        }
        Ok(MetricEstimate { value: mean, std_error: (var / n).sqrt(), trials: values.len(), seed, config_digest })
    }
}

pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Scatterer directions and antenna model shared by every layout of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub coupling: CouplingParams,
    pub directions: IncidentDirections,
}

/// A frozen configuration: B = C·A (M×P) and the large-scale factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub c: DMatrix<Complex64>,
    pub a: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub beta: Vec<f64>,
    pub snr_ut: f64,
    pub digest: u64,
}

impl Scenario {
    pub fn from_matrices(c: DMatrix<Complex64>, a: DMatrix<Complex64>, beta: Vec<f64>, snr_ut: f64) -> Result<Self> {
        if !c.is_square() || c.ncols() != a.nrows() {
            return Err(invalid(format!(
                "C {}x{} and A {}x{} are not conformable",
                c.nrows(),
                c.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if beta.is_empty() || beta.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
            return Err(invalid("need at least one positive large-scale factor"));
        }
        if !(snr_ut >= 0.0) || !snr_ut.is_finite() {
            return Err(invalid(format!("SNR_UT must be non-negative, got {snr_ut}")));
        }
        let b = &c * &a;
        let mut bytes = Vec::with_capacity(16 * b.len() + 8 * beta.len() + 8);
        for v in b.iter() {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        for v in &beta {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bytes.extend_from_slice(&snr_ut.to_le_bytes());
        let digest = fnv1a64(&bytes);
        Ok(Scenario { c, a, b, beta, snr_ut, digest })
    }

    pub fn build(env: &Environment, layout: &AntennaLayout, beta: Vec<f64>, snr_ut: f64) -> Result<Self> {
        let coupling = coupling_for_layout(layout, &env.coupling)?;
        let a = steering_matrix(layout, &env.directions, env.coupling.wavelength)?;
        Scenario::from_matrices(coupling.c, a, beta, snr_ut)
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }

    pub fn p(&self) -> usize {
        self.b.ncols()
    }

    pub fn k(&self) -> usize {
        self.beta.len()
    }

    /// Tr(Aᴴ Cᴴ C A).
    pub fn trace(&self) -> f64 {
        self.b.norm_squared()
    }

    /// G = B H D^{1/2} for one draw of H.
    pub fn channel(&self, h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut g = &self.b * h;
        crate::channel::scale_columns(&mut g, &self.beta);
        g
    }

    fn draw_channel(&self, rng: &mut ChaCha8Rng) -> Result<DMatrix<Complex64>> {
        Ok(self.channel(&draw_small_scale_with(self.p(), self.k(), rng)?))
    }

    /// Per-UT SNRs of one realization under `model`.
    pub fn snr(&self, g: &DMatrix<Complex64>, model: SnrModel) -> Result<Vec<f64>> {
        match model {
            SnrModel::ZeroForcing => zf_snr(g, self.snr_ut),
            SnrModel::Mrc => (0..self.k()).map(|k| mrc_snr(g, k, self.snr_ut)).collect(),
            // Mean over the K eigenvalues; nonlinear metrics go through `eigen_average`.
            SnrModel::Eigenvalue => self.eigen_average(g, |_, s| s),
        }
    }

    /// (1/K) Σ_i φ(SNR_UT β_k ξ_i) for each UT k, for the eigenvalue model.
    fn eigen_average(&self, g: &DMatrix<Complex64>, phi: impl Fn(usize, f64) -> f64) -> Result<Vec<f64>> {
        // G = B H D^{1/2}, so Hᴴ Bᴴ B H = D^{-1/2} Gᴴ G D^{-1/2}.
        let mut w = g.adjoint() * g;
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                w[(i, j)] /= (self.beta[i] * self.beta[j]).sqrt();
            }
        }
        let xi = hermitian_eigenvalues(&w)?;
        let kf = xi.len() as f64;
        Ok(self
            .beta
            .iter()
            .enumerate()
            .map(|(k, &b)| xi.iter().map(|&x| phi(k, self.snr_ut * b * x.max(0.0))).sum::<f64>() / kf)
            .collect())
    }

    /// Per-UT values φ(k, SNR_k) of one realization.
    fn per_ut(&self, g: &DMatrix<Complex64>, model: SnrModel, phi: impl Fn(usize, f64) -> f64) -> Result<Vec<f64>> {
        match model {
            SnrModel::Eigenvalue => self.eigen_average(g, phi),
            _ => Ok(self.snr(g, model)?.into_iter().enumerate().map(|(k, s)| phi(k, s)).collect()),
        }
    }
}

/// Post-ZF SNR_UT / [(GᴴG)⁻¹]_kk for every UT.
pub fn zf_snr(g: &DMatrix<Complex64>, snr_ut: f64) -> Result<Vec<f64>> {
    let gram = g.adjoint() * g;
    let chol = gram.cholesky().ok_or(Error::SingularChannel { attempts: 1 })?;
    let pivots: Vec<f64> = chol.l_dirty().diagonal().iter().map(|v| v.re * v.re).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > GRAM_PIVOT_RATIO * max) {
        return Err(Error::SingularChannel { attempts: 1 });
    }
    let inv = chol.inverse();
    Ok((0..g.ncols()).map(|k| snr_ut / inv[(k, k)].re).collect())
}

/// MRC SNR of UT `k`: SNR_UT‖g_k‖⁴ / (SNR_UT Σ_{i≠k}|g_kᴴ g_i|² + ‖g_k‖²).
pub fn mrc_snr(g: &DMatrix<Complex64>, k: usize, snr_ut: f64) -> Result<f64> {
    if k >= g.ncols() {
        return Err(invalid(format!("UT index {k} out of range for K={}", g.ncols())));
    }
    let gk = g.column(k);
    let energy = gk.norm_squared();
    let interference: f64 = (0..g.ncols()).filter(|&i| i != k).map(|i| gk.dotc(&g.column(i)).norm_sqr()).sum();
    let denom = snr_ut * interference + energy;
    if !(denom > 0.0) {
        return Err(Error::NumericFailure(format!("MRC denominator is {denom}")));
    }
    Ok(snr_ut * energy * energy / denom)
}

/// Runs `trials` independent trials in parallel; each returns a fixed-length
/// vector. Singular channels are redrawn up to `RESAMPLE_CAP` times on the
/// same stream. Returns trial-major values.
pub fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            for _ in 0..=RESAMPLE_CAP {
                match f(&mut rng) {
                    Err(Error::SingularChannel { .. }) => continue,
                    other => return other,
                }
            }
            Err(Error::SingularChannel { attempts: RESAMPLE_CAP + 1 })
        })
        .collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    Ok(())
}

fn column(values: &[Vec<f64>], j: usize) -> Vec<f64> {
    values.iter().map(|v| v[j]).collect()
}

fn digest_with(base: u64, tag: &str, extra: &[f64]) -> u64 {
    let mut bytes = base.to_le_bytes().to_vec();
    bytes.extend_from_slice(tag.as_bytes());
    for v in extra {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fnv1a64(&bytes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub sum: MetricEstimate,
    pub per_ut: Vec<MetricEstimate>,
}

/// Per-trial per-UT rates log₂(1 + SNR_k).
pub fn rate_trials(scn: &Scenario, model: SnrModel, trials: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    run_trials(trials, seed, |rng| {
        let g = scn.draw_channel(rng)?;
        scn.per_ut(&g, model, |_, s| (1.0 + s).log2())
    })
}

/// Ergodic rate E[log₂(1 + SNR_k)] per UT and summed.
pub fn mc_rate(scn: &Scenario, model: SnrModel, trials: usize, seed: u64) -> Result<RateEstimate> {
    check_trials(trials)?;
    let values = rate_trials(scn, model, trials, seed)?;
    let digest = digest_with(scn.digest, &format!("rate/{model:?}"), &[]);
    let sums: Vec<f64> = values.iter().map(|v| pairwise_sum(v)).collect();
    let per_ut =
        (0..scn.k()).map(|k| MetricEstimate::from_samples(&column(&values, k), seed, digest)).collect::<Result<_>>()?;
    Ok(RateEstimate { sum: MetricEstimate::from_samples(&sums, seed, digest)?, per_ut })
}

/// Per-trial SER averaged over UTs: (1/K) Σ_k ω_k Q(√(2ϖ_k SNR_k)).
pub fn ser_trials(
    scn: &Scenario,
    modulation: &[Modulation],
    model: SnrModel,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if modulation.len() != scn.k() {
        return Err(invalid("need one modulation per UT"));
    }
    let values = run_trials(trials, seed, |rng| {
        let g = scn.draw_channel(rng)?;
        let v = scn.per_ut(&g, model, |k, s| {
            let md = modulation[k];
            0.5 * md.omega * erfc((md.varpi * s).sqrt()).unwrap_or(0.0)
        })?;
        Ok(vec![pairwise_sum(&v) / v.len() as f64])
    })?;
    Ok(column(&values, 0))
}

pub fn mc_ser(
    scn: &Scenario,
    modulation: &[Modulation],
    model: SnrModel,
    trials: usize,
    seed: u64,
) -> Result<MetricEstimate> {
    check_trials(trials)?;
    let values = ser_trials(scn, modulation, model, trials, seed)?;
    let params: Vec<f64> = modulation.iter().flat_map(|m| [m.omega, m.varpi]).collect();
    MetricEstimate::from_samples(&values, seed, digest_with(scn.digest, &format!("ser/{model:?}"), &params))
}

/// Per-trial fraction of UTs with SNR_k ≤ SNR_th.
pub fn outage_trials(scn: &Scenario, snr_th: f64, model: SnrModel, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if !(snr_th >= 0.0) {
        return Err(invalid(format!("outage threshold must be non-negative, got {snr_th}")));
    }
    let values = run_trials(trials, seed, |rng| {
        let g = scn.draw_channel(rng)?;
        let v = scn.per_ut(&g, model, |_, s| if s <= snr_th { 1.0 } else { 0.0 })?;
        Ok(vec![pairwise_sum(&v) / v.len() as f64])
    })?;
    Ok(column(&values, 0))
}

pub fn mc_outage(scn: &Scenario, snr_th: f64, model: SnrModel, trials: usize, seed: u64) -> Result<MetricEstimate> {
    check_trials(trials)?;
    let values = outage_trials(scn, snr_th, model, trials, seed)?;
    MetricEstimate::from_samples(&values, seed, digest_with(scn.digest, &format!("outage/{model:?}"), &[snr_th]))
}

/// Per-trial SNR_UT β₁ (ξ₁ − ξ_min) with one h shared by both configurations.
pub fn gain_trials(scn: &Scenario, reference: &Scenario, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if scn.p() != reference.p() {
        return Err(invalid("both configurations must see the same incident directions"));
    }
    let scale = scn.snr_ut * scn.beta[0];
    let values = run_trials(trials, seed, |rng| {
        let h = DMatrix::from_fn(scn.p(), 1, |_, _| complex_gaussian(rng));
        let xi = (&scn.b * &h).norm_squared();
        let xi_min = (&reference.b * &h).norm_squared();
        Ok(vec![scale * (xi - xi_min)])
    })?;
    Ok(column(&values, 0))
}

pub fn mc_gain(scn: &Scenario, reference: &Scenario, trials: usize, seed: u64) -> Result<MetricEstimate> {
    check_trials(trials)?;
    let values = gain_trials(scn, reference, trials, seed)?;
    MetricEstimate::from_samples(&values, seed, digest_with(scn.digest, "gain", &[reference.digest as f64]))
}

/// Per-trial per-UT SNRs under `model` (rows are trials).
pub fn snr_trials(scn: &Scenario, model: SnrModel, trials: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    run_trials(trials, seed, |rng| {
        let g = scn.draw_channel(rng)?;
        scn.snr(&g, model)
    })
}

/// CSV `trial,metric,value` with one-based trial numbers.
pub fn raw_trials_csv(metric: &str, values: &[f64]) -> String {
    let mut out = String::from("trial,metric,value\n");
    for (t, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{metric},{v}", t + 1);
    }
    out
}

/// Pooled spectra of Ψ over independently sampled BPP layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenHistogram {
    pub m: usize,
    pub radius: f64,
    /// Ascending eigenvalues, one row per layout.
    pub spectra: Vec<Vec<f64>>,
    /// Tr(Ψ) per layout.
    pub traces: Vec<f64>,
}

impl EigenHistogram {
    pub fn layouts(&self) -> usize {
        self.spectra.len()
    }

    /// Mean of the r-th smallest eigenvalue (zero-based r) across layouts.
    pub fn rank_means(&self) -> Vec<f64> {
        (0..self.m)
            .map(|r| pairwise_sum(&self.spectra.iter().map(|s| s[r]).collect::<Vec<_>>()) / self.layouts() as f64)
            .collect()
    }

    pub fn pooled(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.spectra.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Equal-width bins over the pooled range: (lower, upper, count).
    pub fn bins(&self, count: usize) -> Vec<(f64, f64, usize)> {
        let pooled = self.pooled();
        if pooled.is_empty() || count == 0 {
            return Vec::new();
        }
        let lo = pooled[0];
        let hi = pooled[pooled.len() - 1];
        let width = if hi > lo { (hi - lo) / count as f64 } else { 1.0 };
        let mut bins: Vec<(f64, f64, usize)> =
            (0..count).map(|i| (lo + i as f64 * width, lo + (i + 1) as f64 * width, 0)).collect();
        for v in pooled {
            let i = (((v - lo) / width) as usize).min(count - 1);
            bins[i].2 += 1;
        }
        bins
    }
}

/// Spectrum of Ψ for `layouts` BPP layouts of M antennas in a disk of radius `radius`.
pub fn eigen_histogram(env: &Environment, m: usize, radius: f64, layouts: usize, seed: u64) -> Result<EigenHistogram> {
    if layouts < MIN_TRIALS {
        return Err(invalid(format!("need at least {MIN_TRIALS} layouts, got {layouts}")));
    }
    let rows: Vec<(Vec<f64>, f64)> = (0..layouts as u64)
        .into_par_iter()
        .map(|i| {
            let mut last = None;
            for attempt in 0..=RESAMPLE_CAP as u64 {
                let layout = sample_bpp(m, radius, derive_seed(seed, "layout", i + (attempt << 32)))?;
                match Scenario::build(env, &layout, vec![1.0], 1.0) {
                    Ok(scn) => {
                        let spec = crate::channel::correlation_from_product(&scn.b)?;
                        let trace = spec.psi.trace().re;
                        return Ok((spec.tau, trace));
                    }
                    Err(e @ (Error::DegenerateLayout { .. } | Error::SingularMatrix { .. })) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap_or_else(|| Error::NumericFailure("layout resampling exhausted".into())))
        })
        .collect::<Result<_>>()?;
    let (spectra, traces) = rows.into_iter().unzip();
    Ok(EigenHistogram { m, radius, spectra, traces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_directions;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zf_orthogonal_columns() {
        let mut g = DMatrix::zeros(4, 2);
        g[(0, 0)] = c(2.0, 0.0);
        g[(1, 1)] = c(0.0, 2.0);
        let s = zf_snr(&g, 3.0).unwrap();
        assert!((s[0] - 12.0).abs() < 1e-12 && (s[1] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn zf_single_user_is_matched_filter() {
        let g = DMatrix::from_column_slice(3, 1, &[c(1.0, 2.0), c(-0.5, 0.1), c(0.3, -1.0)]);
        let s = zf_snr(&g, 2.0).unwrap();
        assert!((s[0] - 2.0 * g.norm_squared()).abs() < 1e-12);
        assert!((mrc_snr(&g, 0, 2.0).unwrap() - s[0]).abs() < 1e-12);
    }

    #[test]
    fn zf_matches_cofactor_inverse() {
        let g = DMatrix::from_row_slice(
            3,
            2,
            &[c(1.0, 0.5), c(0.2, -0.1), c(-0.3, 0.8), c(1.1, 0.0), c(0.4, 0.4), c(-0.7, 0.2)],
        );
        let gram = g.adjoint() * &g;
        let (a, b, d) = (gram[(0, 0)].re, gram[(0, 1)], gram[(1, 1)].re);
        let det = a * d - b.norm_sqr();
        let s = zf_snr(&g, 1.0).unwrap();
        assert!((s[0] - det / d).abs() < 1e-12);
        assert!((s[1] - det / a).abs() < 1e-12);
    }

    #[test]
    fn mrc_naive_loops() {
        let g = DMatrix::from_fn(4, 3, |i, j| c((i as f64 + 1.0) * 0.3 - j as f64, (i * j) as f64 * 0.1 + 0.2));
        let snr = 5.0;
        for k in 0..3 {
            let mut energy = 0.0;
            for i in 0..4 {
                energy += g[(i, k)].norm_sqr();
            }
            let mut interference = 0.0;
            for j in (0..3).filter(|&j| j != k) {
                let mut dot = c(0.0, 0.0);
                for i in 0..4 {
                    dot += g[(i, k)].conj() * g[(i, j)];
                }
                interference += dot.norm_sqr();
            }
            let expected = snr * energy * energy / (snr * interference + energy);
            assert!((mrc_snr(&g, k, snr).unwrap() - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn singular_channel_detected() {
        let g = DMatrix::from_fn(3, 2, |i, _| c(i as f64, 1.0));
        assert!(matches!(zf_snr(&g, 1.0), Err(Error::SingularChannel { .. })));
    }

    #[test]
    fn resampling_cap_fails_loudly() {
        let r = run_trials(3, 1, |_| Err(Error::SingularChannel { attempts: 1 }));
        assert!(matches!(r, Err(Error::SingularChannel { attempts }) if attempts == RESAMPLE_CAP + 1));
    }

    #[test]
    fn pairwise_sum_accuracy() {
        let v = vec![0.1; 1 << 20];
        assert!((pairwise_sum(&v) - 0.1 * (1 << 20) as f64).abs() < 1e-8);
    }

    fn scenario(m: usize, k: usize, snr: f64) -> Scenario {
        let p = CouplingParams::half_wave(0.12);
        let env = Environment { coupling: p, directions: draw_directions(20, 3).unwrap() };
        let layout = sample_bpp(m, 0.12, 4).unwrap();
        Scenario::build(&env, &layout, vec![1e-3; k], snr).unwrap()
    }

    #[test]
    fn zero_snr_gives_unit_qpsk_ser() {
        let scn = scenario(4, 2, 0.0);
        let values = ser_trials(&scn, &[Modulation::QPSK; 2], SnrModel::ZeroForcing, 50, 9).unwrap();
        assert!(values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn outage_extremes() {
        let scn = scenario(6, 2, 10.0);
        assert_eq!(mc_outage(&scn, 0.0, SnrModel::ZeroForcing, 200, 1).unwrap().value, 0.0);
        assert_eq!(mc_outage(&scn, 1e300, SnrModel::ZeroForcing, 200, 1).unwrap().value, 1.0);
    }

    #[test]
    fn identical_configs_give_zero_gain() {
        let scn = scenario(4, 1, 10.0);
        let e = mc_gain(&scn, &scn, 200, 5).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn trial_count_floor() {
        let scn = scenario(4, 1, 10.0);
        assert!(mc_rate(&scn, SnrModel::ZeroForcing, 99, 1).is_err());
    }

    #[test]
    fn eigenvalue_model_mean_is_trace() {
        let scn = scenario(6, 2, 1.0);
        let v = snr_trials(&scn, SnrModel::Eigenvalue, 4000, 2).unwrap();
        let mean: f64 = v.iter().map(|r| r[0]).sum::<f64>() / v.len() as f64;
        let expected = scn.beta[0] * scn.trace();
        assert!((mean / expected - 1.0).abs() < 0.05, "{mean} vs {expected}");
    }

    #[test]
    fn histogram_traces_match_spectra() {
        let env =
            Environment { coupling: CouplingParams::half_wave(0.12), directions: draw_directions(30, 1).unwrap() };
        let h = eigen_histogram(&env, 3, 0.12, 100, 8).unwrap();
        for (s, t) in h.spectra.iter().zip(&h.traces) {
            let sum: f64 = s.iter().sum();
            assert!((sum - t).abs() < 1e-9 * t);
        }
        assert_eq!(h.bins(10).iter().map(|b| b.2).sum::<usize>(), 300);
        assert_eq!(h, eigen_histogram(&env, 3, 0.12, 100, 8).unwrap());
    }
}
