//! Steering, fading and composite channel matrices, the correlation matrix Ψ
//! and its spectrum.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::geometry::AntennaLayout;
use crate::rng::seeded;
use crate::special::lognormal_shadowing;

/// Eigenvalues below this fraction of the largest are set to zero.
pub const EIGEN_CLAMP: f64 = 1e-12;
/// Eigenvalues above this fraction of the largest count toward the effective rank.
pub const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElevationDensity {
    #[default]
    Uniform,
    /// Density cos θ / 2 on [−π/2, π/2].
    Cosine,
}

/// P incident directions (azimuth φ, elevation θ) of the scatterers.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidentDirections {
    pub angles: Vec<(f64, f64)>,
}

impl IncidentDirections {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

pub fn draw_directions(p: usize, seed: u64) -> Result<IncidentDirections> {
    draw_directions_with(p, ElevationDensity::Uniform, &mut seeded(seed))
}

pub fn draw_directions_with<G: Rng + ?Sized>(
    p: usize,
    density: ElevationDensity,
    rng: &mut G,
) -> Result<IncidentDirections> {
    if p == 0 {
        return Err(invalid("need at least one incident direction"));
    }
    let angles = (0..p)
        .map(|_| {
            let phi = TAU * rng.random::<f64>();
            let u: f64 = rng.random();
            let theta = match density {
                ElevationDensity::Uniform => PI * u - FRAC_PI_2,
                ElevationDensity::Cosine => (2.0 * u - 1.0).asin(),
            };
            (phi, theta)
        })
        .collect();
    Ok(IncidentDirections { angles })
}

/// Phase response exp(−j·2π d/λ·sin θ·cos(φ − ψ)) of one antenna.
pub fn steering_element(d: f64, psi: f64, phi: f64, theta: f64, wavelength: f64) -> Result<Complex64> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(invalid(format!("wavelength must be positive, got {wavelength}")));
    }
    if d == 0.0 || theta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let phase = 2.0 * PI * d / wavelength * theta.sin() * (phi - psi).cos();
    Ok(Complex64::from_polar(1.0, -phase))
}

/// A: M×P matrix whose column q is the steering vector of direction q.
pub fn steering_matrix(
    layout: &AntennaLayout,
    dirs: &IncidentDirections,
    wavelength: f64,
) -> Result<DMatrix<Complex64>> {
    let m = layout.len();
    let p = dirs.len();
    let mut a = DMatrix::zeros(m, p);
    for (q, &(phi, theta)) in dirs.angles.iter().enumerate() {
        for (i, pos) in layout.positions().iter().enumerate() {
            a[(i, q)] = steering_element(pos.d, pos.psi, phi, theta, wavelength)?;
        }
    }
    Ok(a)
}

/// One CN(0, 1) sample.
pub fn complex_gaussian<G: Rng + ?Sized>(rng: &mut G) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn draw_small_scale_with<G: Rng + ?Sized>(p: usize, k: usize, rng: &mut G) -> Result<DMatrix<Complex64>> {
    if p == 0 || k == 0 {
        return Err(invalid("small-scale fading needs P, K >= 1"));
    }
    // Column-major fill: UT by UT.
    Ok(DMatrix::from_fn(p, k, |_, _| complex_gaussian(rng)))
}

/// H: P×K with i.i.d. CN(0, 1) entries.
pub fn draw_small_scale(p: usize, k: usize, seed: u64) -> Result<DMatrix<Complex64>> {
    draw_small_scale_with(p, k, &mut seeded(seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScaleParams {
    pub l_resist: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub pathloss_v: f64,
    pub sigma_db: f64,
}

impl Default for LargeScaleParams {
    fn default() -> Self {
        LargeScaleParams { l_resist: 10.0, l_min: 10.0, l_max: 150.0, pathloss_v: 3.8, sigma_db: 8.0 }
    }
}

impl LargeScaleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l_resist > 0.0) || !(self.l_min >= self.l_resist) || !(self.l_max >= self.l_min) {
            return Err(invalid(format!(
                "need 0 < l_resist <= l_min <= l_max, got {}, {}, {}",
                self.l_resist, self.l_min, self.l_max
            )));
        }
        if !(self.pathloss_v > 0.0) {
            return Err(invalid(format!("path-loss exponent must be positive, got {}", self.pathloss_v)));
        }
        Ok(())
    }
}

/// β_k = z_k / (l_k / l_resist)^v for a user at distance l_k.
pub fn large_scale_factor(shadowing: f64, l: f64, params: &LargeScaleParams) -> f64 {
    shadowing / (l / params.l_resist).powf(params.pathloss_v)
}

pub fn draw_large_scale_with<G: Rng + ?Sized>(k: usize, params: &LargeScaleParams, rng: &mut G) -> Result<Vec<f64>> {
    params.validate()?;
    (0..k)
        .map(|_| {
            let l = params.l_min + (params.l_max - params.l_min) * rng.random::<f64>();
            let z = lognormal_shadowing(params.sigma_db, rng)?;
            Ok(large_scale_factor(z, l, params))
        })
        .collect()
}

pub fn draw_large_scale(k: usize, params: &LargeScaleParams, seed: u64) -> Result<Vec<f64>> {
    draw_large_scale_with(k, params, &mut seeded(seed))
}

/// C, A, H, D and G = C·A·H·D^{1/2} for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub c: DMatrix<Complex64>,
    pub a: DMatrix<Complex64>,
    pub h: DMatrix<Complex64>,
    pub beta: Vec<f64>,
    pub g: DMatrix<Complex64>,
}

/// Scales column k of `m` by √β_k.
pub fn scale_columns(m: &mut DMatrix<Complex64>, beta: &[f64]) {
    for (k, &b) in beta.iter().enumerate() {
        let s = b.sqrt();
        m.column_mut(k).iter_mut().for_each(|v| *v *= s);
    }
}

pub fn compose_channel(
    c: &DMatrix<Complex64>,
    a: &DMatrix<Complex64>,
    h: &DMatrix<Complex64>,
    beta: &[f64],
) -> Result<ChannelSet> {
    let (m, p, k) = (a.nrows(), a.ncols(), h.ncols());
    if c.nrows() != m || c.ncols() != m || h.nrows() != p || beta.len() != k {
        return Err(invalid(format!(
            "non-conformable channel factors: C {}x{}, A {}x{}, H {}x{}, D {}",
            c.nrows(),
            c.ncols(),
            m,
            p,
            h.nrows(),
            k,
            beta.len()
        )));
    }
    if beta.iter().any(|&b| !(b > 0.0)) {
        return Err(invalid("large-scale factors must be positive"));
    }
    let mut g = c * a * h;
    scale_columns(&mut g, beta);
    Ok(ChannelSet { c: c.clone(), a: a.clone(), h: h.clone(), beta: beta.to_vec(), g })
}

/// Ψ = C A Aᴴ Cᴴ with its ascending spectrum and correlation coefficient η.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSpectrum {
    pub psi: DMatrix<Complex64>,
    pub tau: Vec<f64>,
    pub eta: f64,
    /// Number of eigenvalues above `RANK_THRESHOLD·τ_M`.
    pub effective_rank: usize,
    /// Number of eigenvalues set to zero by the `EIGEN_CLAMP` rule.
    pub clamped: usize,
}

/// Ascending eigenvalues of the Hermitian part of a square matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    if sym.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NumericFailure("non-finite entry in Hermitian eigenproblem".into()));
    }
    let eig = sym.try_symmetric_eigen(1e-15, 10_000).ok_or_else(|| {
        Error::NumericFailure(format!(
            "Hermitian eigendecomposition of a {}x{} matrix did not converge",
            m.nrows(),
            m.ncols()
        ))
    })?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Spectrum of Ψ = BBᴴ (B = CA). When B is tall the P×P Gram BᴴB is
/// decomposed instead and the remaining M − P eigenvalues are exact zeros.
pub fn correlation_from_product(b: &DMatrix<Complex64>) -> Result<CorrelationSpectrum> {
    let (m, p) = (b.nrows(), b.ncols());
    let psi = b * b.adjoint();
    let mut tau = if m > p {
        let mut t = vec![0.0; m - p];
        t.extend(hermitian_eigenvalues(&(b.adjoint() * b))?);
        t.sort_by(f64::total_cmp);
        t
    } else {
        hermitian_eigenvalues(&psi)?
    };
    let top = tau.last().copied().unwrap_or(0.0).max(0.0);
    let mut clamped = 0;
    for t in tau.iter_mut() {
        if *t < EIGEN_CLAMP * top {
            if *t != 0.0 {
                clamped += 1;
            }
            *t = 0.0;
        }
    }
    let effective_rank = tau.iter().filter(|&&t| t > RANK_THRESHOLD * top).count();
    let eta = matrix_correlation_coefficient(&psi)?;
    Ok(CorrelationSpectrum { psi, tau, eta, effective_rank, clamped })
}

pub fn correlation(c: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> Result<CorrelationSpectrum> {
    if c.ncols() != a.nrows() || !c.is_square() {
        return Err(invalid("correlation needs square C conformable with A"));
    }
    correlation_from_product(&(c * a))
}

/// η = Tr[ΨΨᴴ] / Σ|Ψ_ii|² − 1.
pub fn matrix_correlation_coefficient(psi: &DMatrix<Complex64>) -> Result<f64> {
    if !psi.is_square() {
        return Err(invalid("matrix correlation coefficient needs a square matrix"));
    }
    let diag: f64 = psi.diagonal().iter().map(|v| v.norm_sqr()).sum();
    if diag == 0.0 {
        return Err(invalid("matrix has a zero diagonal"));
    }
    let total: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
    Ok((total / diag - 1.0).max(0.0))
}

/// Tr(Aᴴ Cᴴ C A) = ‖C A‖²_F.
pub fn gram_trace(c: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> f64 {
    (c * a).norm_squared()
}

pub fn spectrum_csv(tau: &[f64]) -> String {
    let mut out = String::from("tau_index,tau_value\n");
    for (i, t) in tau.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_regular, Polar};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn steering_special_cases() {
        let lam = 0.12;
        assert_eq!(steering_element(0.3, 1.0, 2.0, 0.0, lam).unwrap(), c(1.0, 0.0));
        assert_eq!(steering_element(0.0, 1.0, 2.0, 0.7, lam).unwrap(), c(1.0, 0.0));
        let v = steering_element(lam / 4.0, 0.0, 0.0, FRAC_PI_2, lam).unwrap();
        assert!((v - c(0.0, -1.0)).norm() < 1e-15);
        assert!(steering_element(0.1, 0.0, 0.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn steering_matrix_shapes() {
        let layout = make_regular(7, 0.2).unwrap();
        let dirs = draw_directions(5, 3).unwrap();
        let a = steering_matrix(&layout, &dirs, 0.12).unwrap();
        assert_eq!(a.shape(), (7, 5));
        for q in 0..5 {
            assert!((a.column(q).norm() - 7f64.sqrt()).abs() < 1e-12);
        }
        let flat = IncidentDirections { angles: vec![(0.3, 0.0), (1.2, 0.0)] };
        let ones = steering_matrix(&layout, &flat, 0.12).unwrap();
        assert!(ones.iter().all(|v| *v == c(1.0, 0.0)));
    }

    #[test]
    fn directions_in_range_and_deterministic() {
        let d = draw_directions(50, 9).unwrap();
        assert!(d.angles.iter().all(|&(phi, th)| (0.0..TAU).contains(&phi) && th.abs() <= FRAC_PI_2));
        assert_eq!(d, draw_directions(50, 9).unwrap());
        assert!(draw_directions(0, 1).is_err());
        let mut rng = seeded(4);
        let cosine = draw_directions_with(200, ElevationDensity::Cosine, &mut rng).unwrap();
        assert!(cosine.angles.iter().all(|&(_, th)| th.abs() <= FRAC_PI_2));
    }

    #[test]
    fn large_scale_formula() {
        let p = LargeScaleParams { l_resist: 10.0, l_min: 10.0, l_max: 10.0, pathloss_v: 3.8, sigma_db: 0.0 };
        assert_eq!(draw_large_scale(3, &p, 1).unwrap(), vec![1.0; 3]);
        let p = LargeScaleParams { l_min: 100.0, l_max: 100.0, ..p };
        let b = draw_large_scale(1, &p, 1).unwrap()[0];
        assert!((b - 10f64.powf(-3.8)).abs() < 1e-18);
        let bad = LargeScaleParams { l_min: 5.0, ..p };
        assert!(draw_large_scale(1, &bad, 1).is_err());
        assert!(draw_large_scale(50, &LargeScaleParams::default(), 2).unwrap().iter().all(|&b| b > 0.0));
    }

    #[test]
    fn compose_identical_rows_for_flat_steering() {
        let h = draw_small_scale(3, 2, 5).unwrap();
        let a = DMatrix::from_element(4, 3, c(1.0, 0.0));
        let set = compose_channel(&DMatrix::identity(4, 4), &a, &h, &[1.0, 1.0]).unwrap();
        for k in 0..2 {
            let s: Complex64 = h.column(k).sum();
            for m in 0..4 {
                assert!((set.g[(m, k)] - s).norm() < 1e-14);
            }
        }
        assert!(compose_channel(&DMatrix::identity(4, 4), &a, &h, &[1.0]).is_err());
    }

    #[test]
    fn beta_scaling() {
        let h = draw_small_scale(3, 1, 5).unwrap();
        let layout = AntennaLayout::new(0.2, vec![Polar { d: 0.0, psi: 0.0 }, Polar { d: 0.1, psi: 0.4 }]).unwrap();
        let a = steering_matrix(&layout, &draw_directions(3, 1).unwrap(), 0.12).unwrap();
        let cm = DMatrix::identity(2, 2);
        let g1 = compose_channel(&cm, &a, &h, &[1.0]).unwrap().g.norm();
        let g4 = compose_channel(&cm, &a, &h, &[4.0]).unwrap().g.norm();
        assert!((g4 - 2.0 * g1).abs() < 1e-12 * g1);
    }

    #[test]
    fn eta_examples() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert_eq!(matrix_correlation_coefficient(&id).unwrap(), 0.0);
        let two = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)]);
        assert!((matrix_correlation_coefficient(&two).unwrap() - 0.25).abs() < 1e-15);
        let ones = DMatrix::from_element(3, 3, c(1.0, 0.0));
        assert!((matrix_correlation_coefficient(&ones).unwrap() - 2.0).abs() < 1e-15);
        let scaled = &two * c(7.5, 0.0);
        assert!((matrix_correlation_coefficient(&scaled).unwrap() - 0.25).abs() < 1e-15);
        assert!(matrix_correlation_coefficient(&DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn orthogonal_columns_give_column_norm_spectrum() {
        // Columns e1·2 and e2·3 of a 3×2 A.
        let mut a = DMatrix::zeros(3, 2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(0.0, 3.0);
        let s = correlation(&DMatrix::identity(3, 3), &a).unwrap();
        assert_eq!(s.tau.len(), 3);
        assert!((s.tau[1] - 4.0).abs() < 1e-12 && (s.tau[2] - 9.0).abs() < 1e-12);
        assert_eq!(s.tau[0], 0.0);
        assert_eq!(s.effective_rank, 2);
        assert_eq!(s.eta, 0.0);
    }

    #[test]
    fn tall_and_square_paths_agree() {
        let layout = make_regular(12, 0.15).unwrap();
        let a = steering_matrix(&layout, &draw_directions(6, 2).unwrap(), 0.12).unwrap();
        let b = a.clone();
        let fast = correlation_from_product(&b).unwrap();
        let direct = hermitian_eigenvalues(&(&b * b.adjoint())).unwrap();
        let top = direct[11];
        for (x, y) in fast.tau.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-10 * top);
        }
        assert_eq!(fast.effective_rank, 6);
    }
}
