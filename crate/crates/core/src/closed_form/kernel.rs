//! Eigenvalue densities of Hᴴ Σ H conditioned on the spectrum of Σ, evaluated
//! in multiprecision because the Vandermonde-structured sums cancel heavily.
//!
//! `MultiKernel` follows the K-user density: rows of B⁻¹ enter through the
//! Lagrange basis of τ₁…τₙ evaluated at the top eigenvalues. `SingleKernel`
//! follows the single-user density with B explicitly factorized, and serves as
//! an independent route for K = 1.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::mp::{factorial, fl, inverse_with_det, powi, solve_with_det};
use crate::error::{Error, Result};

pub const START_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 1 << 16;
/// Two successive precisions must agree to this relative tolerance.
pub const AGREEMENT: f64 = 1e-13;
/// Terms smaller than this (relative to the density scale) are skipped in sums.
const PRUNE_LOG2: f64 = -110.0;

/// Builds at doubling precisions until the probe values of two consecutive
/// precisions agree, and returns the higher-precision object.
pub(crate) fn verified<T>(build: impl Fn(u32) -> Option<T>, probe: impl Fn(&T) -> Vec<(f64, f64)>) -> Result<T> {
    let mut prec = START_PRECISION;
    let mut prev: Option<Vec<(f64, f64)>> = None;
    while prec <= MAX_PRECISION {
        if let Some(obj) = build(prec) {
            let cur = probe(&obj);
            if let Some(p) = &prev {
                let agree = p.iter().zip(&cur).all(|(&(a, _), &(b, scale))| {
                    a.is_finite() && b.is_finite() && (a - b).abs() <= AGREEMENT * (b.abs() + scale)
                });
                if agree {
                    return Ok(obj);
                }
            }
            prev = Some(cur);
        }
        prec *= 2;
    }
    Err(Error::NumericFailure(format!(
        "closed-form evaluation did not stabilize below {MAX_PRECISION} bits of precision"
    )))
}

fn neg_exp_ratio(prec: u32, x: f64, t: &Float) -> Float {
    let mut e = Float::with_val(prec, x) / t;
    e = -e;
    e.exp()
}

/// Which exponent the closed-form outage terms use for the x^(n+y−s−·) factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageExponent {
    /// n + y − s − 1, the exact reduction of ∫₀^a x^(y−1) e^(−x/t) dx.
    #[default]
    Corrected,
    /// n + y − s − 3, a commonly printed variant that does not integrate the density correctly.
    AsPrinted,
}

#[derive(Debug, Clone)]
pub(crate) struct MultiKernel {
    pub prec: u32,
    pub n: usize,
    pub k: usize,
    pub tau: Vec<Float>,
    /// L[i][p] = Σ_q [B⁻¹]_{q,p} τ_{n+i}^{q−1}.
    pub lag: Vec<Vec<Float>>,
    pub upsilon: Float,
    /// Cofactors D(i, j) of Ω.
    pub cof: Vec<Vec<Float>>,
    /// Density coefficients: f(x) = Σ_m e^(−x/τ_m) Σ_j coef[m][j] x^j.
    pub coef: Vec<Vec<Float>>,
    coef_log2: Vec<Vec<f64>>,
    tau_f64: Vec<f64>,
    density_scale_log2: f64,
}

impl MultiKernel {
    pub fn build(tau: &[f64], k: usize, prec: u32) -> Option<Self> {
        let m = tau.len();
        if k == 0 || m <= k {
            return None;
        }
        let n = m - k;
        let t: Vec<Float> = tau.iter().map(|&v| fl(prec, v)).collect();

        // Barycentric weights of the lower nodes.
        let w: Vec<Float> = (0..n)
            .map(|p| {
                let mut prod = fl(prec, 1.0);
                for r in (0..n).filter(|&r| r != p) {
                    prod *= Float::with_val(prec, &t[p] - &t[r]);
                }
                Float::with_val(prec, 1.0 / prod)
            })
            .collect();

        let mut ell = Vec::with_capacity(k);
        let mut lag = Vec::with_capacity(k);
        for i in 0..k {
            let top = &t[n + i];
            let mut l_top = fl(prec, 1.0);
            for r in 0..n {
                l_top *= Float::with_val(prec, top - &t[r]);
            }
            let row: Vec<Float> = (0..n)
                .map(|p| {
                    let diff = Float::with_val(prec, top - &t[p]);
                    Float::with_val(prec, &l_top * &w[p]) / diff
                })
                .collect();
            ell.push(l_top);
            lag.push(row);
        }

        let mut kernel = MultiKernel {
            prec,
            n,
            k,
            tau: t,
            lag,
            upsilon: fl(prec, 0.0),
            cof: Vec::new(),
            coef: Vec::new(),
            coef_log2: Vec::new(),
            tau_f64: tau.to_vec(),
            density_scale_log2: -(tau.iter().sum::<f64>() / k as f64).log2(),
        };

        // Ω_ij = (j−1)! E_i[t^{n+j−1}] with one-based j.
        let omega: Vec<Vec<Float>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let phi: Vec<Float> = kernel.tau.iter().map(|x| powi(x, (n + j) as u32)).collect();
                        factorial(prec, j as u32) * kernel.apply(i, &phi)
                    })
                    .collect()
            })
            .collect();
        let (inv, det) = inverse_with_det(omega, prec)?;
        kernel.cof = (0..k).map(|i| (0..k).map(|j| Float::with_val(prec, &det * &inv[j][i])).collect()).collect();

        let mut denom = fl(prec, k as f64);
        for p in 1..k {
            denom *= factorial(prec, p as u32);
        }
        for l in &ell {
            denom *= l;
        }
        for i in 0..k {
            for j in i + 1..k {
                denom *= Float::with_val(prec, &kernel.tau[n + j] - &kernel.tau[n + i]);
            }
        }
        kernel.upsilon = Float::with_val(prec, 1.0 / denom);

        let a: Vec<Vec<Float>> = kernel
            .cof
            .iter()
            .map(|row| row.iter().map(|d| Float::with_val(prec, d * &kernel.upsilon)).collect())
            .collect();
        let mut coef = vec![vec![fl(prec, 0.0); k]; m];
        for p in 0..n {
            let lead = powi(&kernel.tau[p], (n - 1) as u32);
            for j in 0..k {
                let mut s = fl(prec, 0.0);
                for i in 0..k {
                    s += Float::with_val(prec, &a[i][j] * &kernel.lag[i][p]);
                }
                coef[p][j] = -(s * &lead);
            }
        }
        for i in 0..k {
            let lead = powi(&kernel.tau[n + i], (n - 1) as u32);
            for j in 0..k {
                coef[n + i][j] = Float::with_val(prec, &a[i][j] * &lead);
            }
        }
        kernel.coef_log2 = coef
            .iter()
            .map(|row| row.iter().map(|c| if c.is_zero() { f64::NEG_INFINITY } else { log2_abs(c) }).collect())
            .collect();
        kernel.coef = coef;
        Some(kernel)
    }

    /// E_i[φ] = φ(τ_{n+i}) − Σ_p L[i][p] φ(τ_p) for φ given at every node.
    pub fn apply(&self, i: usize, phi: &[Float]) -> Float {
        let mut s = phi[self.n + i].clone();
        for p in 0..self.n {
            s -= Float::with_val(self.prec, &self.lag[i][p] * &phi[p]);
        }
        s
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let prec = self.prec;
        let lx = if x > 0.0 { x.log2() } else { f64::NEG_INFINITY };
        let xf = fl(prec, x);
        let mut total = fl(prec, 0.0);
        for (m, row) in self.coef.iter().enumerate() {
            let decay = -x / self.tau_f64[m] * std::f64::consts::LOG2_E;
            let keep = self.coef_log2[m].iter().enumerate().any(|(j, &lc)| {
                let pw = if j == 0 { 0.0 } else { j as f64 * lx };
                lc + pw + decay - self.density_scale_log2 > PRUNE_LOG2
            });
            if !keep {
                continue;
            }
            let mut poly = row[self.k - 1].clone();
            for j in (0..self.k - 1).rev() {
                poly *= &xf;
                poly += &row[j];
            }
            total += poly * neg_exp_ratio(prec, x, &self.tau[m]);
        }
        total.to_f64()
    }

    /// ∫ f, which must be one.
    pub fn normalization(&self) -> f64 {
        let mut s = fl(self.prec, 0.0);
        for (m, row) in self.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let t = factorial(self.prec, j as u32) * powi(&self.tau[m], (j + 1) as u32);
                s += t * c;
            }
        }
        s.to_f64()
    }

    /// E[ξ] for the unordered eigenvalue.
    pub fn mean(&self) -> f64 {
        let mut s = fl(self.prec, 0.0);
        for (m, row) in self.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let t = factorial(self.prec, (j + 1) as u32) * powi(&self.tau[m], (j + 2) as u32);
                s += t * c;
            }
        }
        s.to_f64()
    }

    /// E[Σ_i 1/ξ_i] = K ∫ f(x)/x dx in the Γ(j−1) / logarithmic form.
    /// With `log_term_all_j` the logarithmic term is summed over every cofactor
    /// column instead of only the first.
    pub fn mean_inverse_sum(&self, log_term_all_j: bool) -> f64 {
        let prec = self.prec;
        let (n, k) = (self.n, self.k);
        let mut sum = fl(prec, 0.0);
        for j in 1..k {
            // one-based column j+1: Γ(j) t^{n+j−1}
            let phi: Vec<Float> = self.tau.iter().map(|x| powi(x, (n + j - 1) as u32)).collect();
            let g = factorial(prec, (j - 1) as u32);
            for i in 0..k {
                let e = self.apply(i, &phi);
                sum += Float::with_val(prec, &g * &self.cof[i][j]) * e;
            }
        }
        let euler = Float::with_val(prec, Constant::Euler);
        let phi: Vec<Float> = self
            .tau
            .iter()
            .map(|x| {
                let l = Float::with_val(prec, x.ln_ref()) - &euler;
                powi(x, (n - 1) as u32) * l
            })
            .collect();
        let cols = if log_term_all_j { k } else { 1 };
        for i in 0..k {
            let e = self.apply(i, &phi);
            for j in 0..cols {
                sum += Float::with_val(prec, &self.cof[i][j] * &e);
            }
        }
        let r = sum * &self.upsilon * Float::with_val(prec, k as f64);
        r.to_f64()
    }

    /// P(ξ ≤ y) through the closed incomplete-Gamma terms.
    pub fn cdf(&self, y: f64, exponent: OutageExponent) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let prec = self.prec;
        let (n, k) = (self.n, self.k);
        let shift: i32 = match exponent {
            OutageExponent::Corrected => 1,
            OutageExponent::AsPrinted => 3,
        };
        let yf = fl(prec, y);
        // theta[j][m] = ϑ(τ_m, j+1)
        let mut theta = vec![Vec::with_capacity(self.tau.len()); k];
        for x in &self.tau {
            let e = neg_exp_ratio(prec, y, x);
            for (j, row) in theta.iter_mut().enumerate() {
                let fj = factorial(prec, j as u32);
                let mut tail = fl(prec, 0.0);
                let mut ys = fl(prec, 1.0);
                for s in 0..=j {
                    let expo = (n + j + 1) as i32 - s as i32 - shift;
                    let term = Float::with_val(prec, &fj / factorial(prec, s as u32)) * &ys * x.clone().pow(expo);
                    tail += term;
                    ys *= &yf;
                }
                let head = Float::with_val(prec, &fj * powi(x, (n + j) as u32));
                row.push(head - tail * &e);
            }
        }
        let mut sum = fl(prec, 0.0);
        for i in 0..k {
            for (j, phi) in theta.iter().enumerate() {
                sum += self.apply(i, phi) * &self.cof[i][j];
            }
        }
        (sum * &self.upsilon).to_f64()
    }

    pub fn node_count(&self) -> usize {
        self.tau.len()
    }
}

fn log2_abs(x: &Float) -> f64 {
    let (mant, exp) = x.to_f64_exp();
    mant.abs().log2() + exp as f64
}

/// Single-user density with the Vandermonde block B factorized explicitly.
#[derive(Debug, Clone)]
pub(crate) struct SingleKernel {
    pub prec: u32,
    pub tau: Vec<Float>,
    /// y_p = Σ_q [B⁻¹]_{q,p} τ_M^{q−1}.
    pub weights: Vec<Float>,
    /// det B / Π_{i<j}(τ_j − τ_i).
    pub prefactor: Float,
}

impl SingleKernel {
    pub fn build(tau: &[f64], prec: u32) -> Option<Self> {
        let m = tau.len();
        if m < 2 {
            return None;
        }
        let t: Vec<Float> = tau.iter().map(|&v| fl(prec, v)).collect();
        let top = &t[m - 1];
        // Bᵀ y = u with B[r][c] = τ_r^c, u_c = τ_M^c.
        let bt: Vec<Vec<Float>> = (0..m - 1).map(|c| (0..m - 1).map(|r| powi(&t[r], c as u32)).collect()).collect();
        let u: Vec<Float> = (0..m - 1).map(|c| powi(top, c as u32)).collect();
        let (weights, det_b) = solve_with_det(bt, &u, prec)?;
        let mut vander = fl(prec, 1.0);
        for j in 0..m {
            for i in 0..j {
                vander *= Float::with_val(prec, &t[j] - &t[i]);
            }
        }
        let prefactor = det_b / vander;
        Some(SingleKernel { prec, tau: t, weights, prefactor })
    }

    fn combine(&self, node: impl Fn(&Float) -> Float) -> Float {
        let m = self.tau.len();
        let mut s = node(&self.tau[m - 1]);
        for p in 0..m - 1 {
            s -= Float::with_val(self.prec, &self.weights[p] * node(&self.tau[p]));
        }
        Float::with_val(self.prec, &self.prefactor * &s)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let e = (self.tau.len() - 2) as u32;
        self.combine(|t| powi(t, e) * neg_exp_ratio(self.prec, x, t)).to_f64()
    }

    /// E[ξ₁] = det B/Π(τ_j − τ_i) · (τ_M^M − Σ y_p τ_p^M).
    pub fn mean(&self) -> f64 {
        let e = self.tau.len() as u32;
        self.combine(|t| powi(t, e)).to_f64()
    }

    pub fn normalization(&self) -> f64 {
        let e = (self.tau.len() - 1) as u32;
        self.combine(|t| powi(t, e)).to_f64()
    }
}
