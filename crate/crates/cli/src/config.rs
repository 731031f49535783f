//! Flat `key = value` experiment configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use mimo_core::channel::LargeScaleParams;
use mimo_core::coupling::{CouplingParams, FREE_SPACE_IMPEDANCE};
use mimo_core::rng::fnv1a64;
use num_complex::Complex64;

use crate::CliError;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const MAX_TRIALS: usize = 10_000;
pub const MAX_ANTENNAS: usize = 400;

/// A length given either in meters or in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn meters(&self, wavelength: f64) -> f64 {
        match *self {
            Length::Meters(v) => v,
            Length::Wavelengths(v) => v * wavelength,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        let t = s.trim();
        for suffix in ["λ", "lambda", "lam"] {
            if let Some(num) = t.strip_suffix(suffix) {
                let num = num.trim();
                let v = if num.is_empty() { 1.0 } else { parse_f64(num)? };
                return Ok(Length::Wavelengths(v));
            }
        }
        Ok(Length::Meters(parse_f64(t.strip_suffix('m').unwrap_or(t).trim())?))
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Meters(v) => write!(f, "{v}m"),
            Length::Wavelengths(v) => write!(f, "{v}lam"),
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Usage(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> Result<usize, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("not a non-negative integer: {s:?}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub carrier_frequency: f64,
    pub p: usize,
    pub k: usize,
    pub snr_ut_db: f64,
    pub z0: f64,
    pub zl: f64,
    pub dipole_l: Length,
    pub sigma_shadow_db: f64,
    pub l_resist: f64,
    pub l_min: f64,
    pub l_max: f64,
    /// UT distance used for β₁ in the single-UT gain sweep.
    pub l_1: f64,
    pub pathloss_v: f64,
    pub snr_th_db: f64,
    pub m_min: usize,
    pub r_min: Length,
    pub seed: u64,
    pub trials: usize,
    /// Layouts pooled by the eigenvalue histogram.
    pub layouts: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            carrier_frequency: 2.5e9,
            p: 100,
            k: 10,
            snr_ut_db: 15.0,
            z0: 50.0,
            zl: 50.0,
            dipole_l: Length::Wavelengths(0.5),
            sigma_shadow_db: 8.0,
            l_resist: 10.0,
            l_min: 10.0,
            l_max: 150.0,
            l_1: 100.0,
            pathloss_v: 3.8,
            snr_th_db: -3.0,
            m_min: 2,
            r_min: Length::Wavelengths(1.0),
            seed: 20_160_901,
            trials: 10_000,
            layouts: 10_000,
        }
    }
}

pub const KEYS: &[&str] = &[
    "carrier_frequency",
    "P",
    "K",
    "SNR_UT_dB",
    "Z0",
    "ZL",
    "dipole_l",
    "sigma_shadow_dB",
    "l_resist",
    "l_range",
    "l_1",
    "pathloss_v",
    "SNR_th_dB",
    "M_min",
    "R_min",
    "seed",
    "trials",
    "layouts",
];

impl ExperimentConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn snr_ut(&self) -> f64 {
        db_to_linear(self.snr_ut_db)
    }

    pub fn snr_th(&self) -> f64 {
        db_to_linear(self.snr_th_db)
    }

    pub fn coupling(&self) -> CouplingParams {
        let wavelength = self.wavelength();
        CouplingParams {
            wavelength,
            dipole_length: self.dipole_l.meters(wavelength),
            free_space_impedance: FREE_SPACE_IMPEDANCE,
            z0: Complex64::new(self.z0, 0.0),
            zl: Complex64::new(self.zl, 0.0),
        }
    }

    pub fn large_scale(&self) -> LargeScaleParams {
        LargeScaleParams {
            l_resist: self.l_resist,
            l_min: self.l_min,
            l_max: self.l_max,
            pathloss_v: self.pathloss_v,
            sigma_db: self.sigma_shadow_db,
        }
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key.trim() {
            "carrier_frequency" => self.carrier_frequency = parse_f64(v)?,
            "P" => self.p = parse_usize(v)?,
            "K" => self.k = parse_usize(v)?,
            "SNR_UT_dB" => self.snr_ut_db = parse_f64(v)?,
            "Z0" => self.z0 = parse_f64(v)?,
            "ZL" => self.zl = parse_f64(v)?,
            "dipole_l" => self.dipole_l = Length::parse(v)?,
            "sigma_shadow_dB" => self.sigma_shadow_db = parse_f64(v)?,
            "l_resist" => self.l_resist = parse_f64(v)?,
            "l_range" => {
                let (a, b) = v
                    .trim_matches(|c| c == '[' || c == ']')
                    .split_once([',', ':'])
                    .ok_or_else(|| CliError::Usage(format!("l_range must look like 10,150, got {v:?}")))?;
                self.l_min = parse_f64(a)?;
                self.l_max = parse_f64(b)?;
            }
            "l_1" => self.l_1 = parse_f64(v)?,
            "pathloss_v" => self.pathloss_v = parse_f64(v)?,
            "SNR_th_dB" => self.snr_th_db = parse_f64(v)?,
            "M_min" => self.m_min = parse_usize(v)?,
            "R_min" => self.r_min = Length::parse(v)?,
            "seed" => self.seed = v.parse().map_err(|_| CliError::Usage(format!("bad seed {v:?}")))?,
            "trials" => self.trials = parse_usize(v)?,
            "layouts" => self.layouts = parse_usize(v)?,
            other => return Err(CliError::Usage(format!("unknown config key {other:?} (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Parses INI-style text: `key = value` lines, `#`/`;` comments, and
    /// `[section]` headers, which are ignored.
    pub fn parse_into(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value, got {raw:?}", n + 1)))?;
            self.set(k, v).map_err(|e| CliError::Usage(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        cfg.parse_into(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.carrier_frequency > 0.0) {
            return bad(format!("carrier_frequency must be positive, got {}", self.carrier_frequency));
        }
        if self.p == 0 || self.k == 0 {
            return bad("P and K must be at least 1".into());
        }
        if !(self.z0 > 0.0) || !(self.zl > 0.0) {
            return bad("Z0 and ZL must be positive".into());
        }
        if !(self.dipole_l.meters(self.wavelength()) > 0.0) {
            return bad("dipole_l must be positive".into());
        }
        if !(self.sigma_shadow_db >= 0.0) {
            return bad("sigma_shadow_dB must be non-negative".into());
        }
        if !(self.l_resist > 0.0 && self.l_resist <= self.l_min && self.l_min <= self.l_max) {
            return bad(format!(
                "need 0 < l_resist <= l_min <= l_max, got {}, {}, {}",
                self.l_resist, self.l_min, self.l_max
            ));
        }
        if !(self.l_1 >= self.l_resist) {
            return bad("l_1 must be at least l_resist".into());
        }
        if !(self.pathloss_v > 0.0) {
            return bad("pathloss_v must be positive".into());
        }
        if self.m_min < 2 {
            return bad("M_min must be at least 2".into());
        }
        if !(self.r_min.meters(self.wavelength()) > 0.0) {
            return bad("R_min must be positive".into());
        }
        if self.trials < 100 || self.trials > MAX_TRIALS {
            return bad(format!("trials must be in 100..={MAX_TRIALS}, got {}", self.trials));
        }
        if self.layouts < 100 || self.layouts > MAX_TRIALS {
            return bad(format!("layouts must be in 100..={MAX_TRIALS}, got {}", self.layouts));
        }
        Ok(())
    }

    /// Canonical `key = value` listing in a fixed key order.
    pub fn canonical(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert("carrier_frequency", format!("{:e}", self.carrier_frequency));
        map.insert("P", self.p.to_string());
        map.insert("K", self.k.to_string());
        map.insert("SNR_UT_dB", self.snr_ut_db.to_string());
        map.insert("Z0", self.z0.to_string());
        map.insert("ZL", self.zl.to_string());
        map.insert("dipole_l", self.dipole_l.to_string());
        map.insert("sigma_shadow_dB", self.sigma_shadow_db.to_string());
        map.insert("l_resist", self.l_resist.to_string());
        map.insert("l_range", format!("{},{}", self.l_min, self.l_max));
        map.insert("l_1", self.l_1.to_string());
        map.insert("pathloss_v", self.pathloss_v.to_string());
        map.insert("SNR_th_dB", self.snr_th_db.to_string());
        map.insert("M_min", self.m_min.to_string());
        map.insert("R_min", self.r_min.to_string());
        map.insert("seed", self.seed.to_string());
        map.insert("trials", self.trials.to_string());
        map.insert("layouts", self.layouts.to_string());
        map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn digest(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical().as_bytes()))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
