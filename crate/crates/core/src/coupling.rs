//! Thin-dipole mutual impedances and the resulting mutual coupling matrix.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::AntennaLayout;
use crate::special::{cosine_integral, sine_integral};

/// Impedance of free space in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;
/// Closest allowed antenna spacing, as a fraction of the wavelength.
pub const MIN_SPACING_WAVELENGTHS: f64 = 1e-4;
/// Condition number above which the coupling inversion is flagged.
pub const CONDITION_WARNING: f64 = 1e12;
/// Condition number above which the inversion is refused.
pub const CONDITION_LIMIT: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub wavelength: f64,
    pub dipole_length: f64,
    pub free_space_impedance: f64,
    pub z0: Complex64,
    pub zl: Complex64,
}

impl CouplingParams {
    /// Half-wave dipoles with 50 Ω self and load impedances.
    pub fn half_wave(wavelength: f64) -> Self {
        CouplingParams {
            wavelength,
            dipole_length: 0.5 * wavelength,
            free_space_impedance: FREE_SPACE_IMPEDANCE,
            z0: Complex64::new(50.0, 0.0),
            zl: Complex64::new(50.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(invalid(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if !(self.dipole_length > 0.0) || !self.dipole_length.is_finite() {
            return Err(invalid(format!("dipole length must be positive, got {}", self.dipole_length)));
        }
        if !(self.free_space_impedance > 0.0) {
            return Err(invalid("free-space impedance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub z_c: DMatrix<Complex64>,
    pub c: DMatrix<Complex64>,
    /// 1-norm condition estimate of Z_L·I + Z_C.
    pub condition: f64,
}

impl CouplingMatrices {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARNING
    }
}

/// The three normalized arguments ς, μ, ρ for spacing `d`.
pub fn impedance_arguments(d: f64, params: &CouplingParams) -> (f64, f64, f64) {
    let k = 2.0 * PI / params.wavelength;
    let l = params.dipole_length;
    let root = d.hypot(l);
    (k * d, k * (root + l), k * (root - l))
}

/// Mutual impedance between two parallel side-by-side dipoles `d` meters apart.
pub fn mutual_impedance(d: f64, params: &CouplingParams) -> Result<Complex64> {
    params.validate()?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid(format!("mutual impedance needs a positive spacing, got {d}")));
    }
    let (s, mu, rho) = impedance_arguments(d, params);
    let re = 2.0 * cosine_integral(s)? - cosine_integral(mu)? - cosine_integral(rho)?;
    let im = 2.0 * sine_integral(s)? - sine_integral(mu)? - sine_integral(rho)?;
    Ok(Complex64::new(re, -im) * (params.free_space_impedance / (4.0 * PI)))
}

/// Z_C: mutual impedances off the diagonal, Z₀ on it.
pub fn impedance_matrix(layout: &AntennaLayout, params: &CouplingParams) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    let m = layout.len();
    let floor = MIN_SPACING_WAVELENGTHS * params.wavelength;
    let (spacing, i, j) = layout.min_spacing();
    if m > 1 && spacing < floor {
        return Err(Error::DegenerateLayout { i, j, distance: spacing });
    }
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i + 1..m).map(|j| mutual_impedance(layout.pairwise_distance(i, j)?, params)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut z = DMatrix::from_element(m, m, params.z0);
    for (i, row) in rows.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + 1 + offset;
            z[(i, j)] = v;
            z[(j, i)] = v;
        }
    }
    Ok(z)
}

fn norm1(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// C = (Z₀ + Z_L)(Z_L·I + Z_C)⁻¹.
pub fn coupling_matrix(z_c: &DMatrix<Complex64>, params: &CouplingParams) -> Result<CouplingMatrices> {
    if !z_c.is_square() {
        return Err(invalid("impedance matrix must be square"));
    }
    let m = z_c.nrows();
    let a = z_c + DMatrix::<Complex64>::identity(m, m) * params.zl;
    let inv = a.clone().lu().try_inverse().ok_or(Error::SingularMatrix { condition: f64::INFINITY })?;
    let condition = norm1(&a) * norm1(&inv);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SingularMatrix { condition });
    }
    let c = inv * (params.z0 + params.zl);
    Ok(CouplingMatrices { z_c: z_c.clone(), c, condition })
}

pub fn coupling_for_layout(layout: &AntennaLayout, params: &CouplingParams) -> Result<CouplingMatrices> {
    let z = impedance_matrix(layout, params)?;
    coupling_matrix(&z, params)
}

/// Row-major dump with interleaved real and imaginary parts.
pub fn impedance_csv(z_c: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Z_C M={}", z_c.nrows());
    for i in 0..z_c.nrows() {
        let cells: Vec<String> = (0..z_c.ncols())
            .flat_map(|j| {
                let v = z_c[(i, j)];
                [v.re.to_string(), v.im.to_string()]
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
