//! Everything a sweep point needs, derived deterministically from the config seed.

use mimo_core::channel::{
    correlation_from_product, draw_directions_with, draw_large_scale, large_scale_factor, ElevationDensity,
};
use mimo_core::closed_form::{prepare_spectrum, EigenDensity, PreparedSpectrum, SystemParams};
use mimo_core::geometry::{make_regular, make_with_target_zeta, sample_bpp, AntennaLayout};
use mimo_core::monte_carlo::{Environment, Scenario};
use mimo_core::rng::{derive_seed, seeded};
use mimo_core::special::lognormal_shadowing;
use nalgebra::DMatrix;

use crate::config::ExperimentConfig;
use crate::CliError;

/// Tolerance when jittering a layout toward a target ζ.
pub const ZETA_TOLERANCE: f64 = 0.1;

/// How antenna positions are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaSpec {
    /// Uniform i.i.d. positions in the disk (ζ ≈ 1.5).
    Bpp,
    /// Regular grid (0) or a jittered grid whose measured ζ is within tolerance.
    Target(f64),
}

impl ZetaSpec {
    pub fn parse_list(s: &str) -> Result<Vec<ZetaSpec>, CliError> {
        let v: Vec<ZetaSpec> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                if t.eq_ignore_ascii_case("bpp") {
                    Ok(ZetaSpec::Bpp)
                } else {
                    let z = crate::config::parse_f64(t)?;
                    if z < 0.0 {
                        return Err(CliError::Usage(format!("zeta must be non-negative, got {z}")));
                    }
                    Ok(ZetaSpec::Target(z))
                }
            })
            .collect::<Result<_, _>>()?;
        if v.is_empty() {
            return Err(CliError::Usage("empty zeta list".into()));
        }
        Ok(v)
    }

    pub fn label(&self) -> String {
        match self {
            ZetaSpec::Bpp => "bpp".into(),
            ZetaSpec::Target(z) => z.to_string(),
        }
    }
}

/// A frozen configuration together with its spectrum.
#[derive(Debug, Clone)]
pub struct Point {
    pub layout: AntennaLayout,
    pub scenario: Scenario,
    pub tau: Vec<f64>,
    pub eta: f64,
    pub prepared: PreparedSpectrum,
}

impl Point {
    pub fn density(&self, k: usize) -> Result<EigenDensity, CliError> {
        Ok(EigenDensity::new(&self.prepared.tau, k)?)
    }

    pub fn params(&self, snr_ut: f64, snr_th: f64) -> SystemParams {
        let mut p = SystemParams::new(snr_ut, self.scenario.beta.clone(), self.prepared.tau.len());
        p.snr_th = snr_th;
        p
    }
}

#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub env: Environment,
    /// β_k of the K UTs, distances uniform on the configured range.
    pub beta: Vec<f64>,
    /// β₁ of the single-UT gain experiment (distance l_1).
    pub beta_1: f64,
}

impl Context {
    pub fn new(cfg: ExperimentConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let directions = draw_directions_with(
            cfg.p,
            ElevationDensity::Uniform,
            &mut seeded(derive_seed(cfg.seed, "directions", 0)),
        )?;
        let ls = cfg.large_scale();
        let beta = draw_large_scale(cfg.k, &ls, derive_seed(cfg.seed, "large-scale", 0))?;
        let z = lognormal_shadowing(cfg.sigma_shadow_db, &mut seeded(derive_seed(cfg.seed, "beta-1", 0)))?;
        let beta_1 = large_scale_factor(z, cfg.l_1, &ls);
        let env = Environment { coupling: cfg.coupling(), directions };
        Ok(Context { cfg, env, beta, beta_1 })
    }

    pub fn wavelength(&self) -> f64 {
        self.cfg.wavelength()
    }

    /// Layout of M antennas in radius `radius` (meters); `tag` and `rep` select
    /// independent random draws.
    pub fn layout(
        &self,
        m: usize,
        radius: f64,
        zeta: ZetaSpec,
        tag: &str,
        rep: u64,
    ) -> Result<AntennaLayout, CliError> {
        let label = format!("layout/{tag}/{}/{m}/{:016x}", zeta.label(), radius.to_bits());
        let seed = derive_seed(self.cfg.seed, &label, rep);
        Ok(match zeta {
            ZetaSpec::Bpp => sample_bpp(m, radius, seed)?,
            ZetaSpec::Target(0.0) => make_regular(m, radius)?,
            ZetaSpec::Target(z) => make_with_target_zeta(m, radius, z, ZETA_TOLERANCE, seed)?,
        })
    }

    pub fn point(&self, layout: AntennaLayout, beta: Vec<f64>, coupled: bool) -> Result<Point, CliError> {
        let scenario = if coupled {
            Scenario::build(&self.env, &layout, beta, self.cfg.snr_ut())?
        } else {
            let a = mimo_core::channel::steering_matrix(&layout, &self.env.directions, self.wavelength())?;
            let m = layout.len();
            Scenario::from_matrices(DMatrix::identity(m, m), a, beta, self.cfg.snr_ut())?
        };
        let spec = correlation_from_product(&scenario.b)?;
        let prepared = prepare_spectrum(&spec.tau)?;
        Ok(Point { layout, scenario, tau: spec.tau, eta: spec.eta, prepared })
    }

    /// The reference configuration (M_min, R_min) used by the gain sweep.
    pub fn reference(&self, zeta: ZetaSpec) -> Result<Point, CliError> {
        let r = self.cfg.r_min.meters(self.wavelength());
        let layout = self.layout(self.cfg.m_min, r, zeta, "reference", 0)?;
        self.point(layout, vec![self.beta_1], true)
    }
}
