//! The named sweeps. Each produces one CSV with a fixed column schema
//! (documented in docs/schemas.md) and a few human-readable summary lines.
//! Points are evaluated in parallel and emitted in axis order; every row
//! depends only on the config seed and its own axis values.

use mimo_core::closed_form::{
    asymptotic_gain, asymptotic_rate_from_trace, asymptotic_ser_from_trace, ergodic_gain, outage_closed_form_with,
    outage_quadrature_with, rate_lower_bound_with, ser_closed_form_with, Modulation, OutageExponent, SpectrumPair,
};
use mimo_core::monte_carlo::{eigen_histogram, mc_gain, mc_outage, mc_rate, mc_ser, SnrModel};
use mimo_core::rng::derive_seed;
use rayon::prelude::*;

use crate::config::{db_to_linear, Length, MAX_ANTENNAS};
use crate::scene::{Context, Point, ZetaSpec};
use crate::CliError;

pub const SWEEPS: &[&str] = &["eigen-hist", "eta", "gain", "rate", "rate-coupling", "ser", "outage"];

/// Layouts averaged per (M, R, ζ) point of the η sweep.
pub const ETA_LAYOUTS: u64 = 8;
/// Bins of the eigenvalue histogram.
pub const HISTOGRAM_BINS: usize = 60;

/// Axis overrides; `None` selects the sweep's default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepArgs {
    pub m: Option<Vec<usize>>,
    pub r: Option<Vec<Length>>,
    pub zeta: Option<Vec<ZetaSpec>>,
    pub snr_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub name: String,
    pub csv: String,
    pub summary: Vec<String>,
}

fn lam(s: &str) -> Vec<Length> {
    crate::axis::parse_lengths(s).expect("default axis")
}

fn counts(s: &str) -> Vec<usize> {
    crate::axis::parse_counts(s).expect("default axis")
}

fn check_counts(ms: &[usize]) -> Result<(), CliError> {
    for &m in ms {
        if m == 0 || m > MAX_ANTENNAS {
            return Err(CliError::Usage(format!("M must be in 1..={MAX_ANTENNAS}, got {m}")));
        }
    }
    Ok(())
}

/// Drops antenna counts with M <= K, which the closed forms cannot evaluate.
/// Returns the remaining counts and a note for the summary when any were dropped.
fn usable_counts(ms: Vec<usize>, k: usize) -> Result<(Vec<usize>, Option<String>), CliError> {
    check_counts(&ms)?;
    let (keep, dropped): (Vec<usize>, Vec<usize>) = ms.into_iter().partition(|&m| m > k);
    if keep.is_empty() {
        return Err(CliError::Usage(format!("need M > K, but every M is at most K={k}")));
    }
    let note = (!dropped.is_empty()).then(|| {
        let list: Vec<String> = dropped.iter().map(|m| m.to_string()).collect();
        format!("skipped M = {} (need M > K = {k})", list.join(", "))
    });
    Ok((keep, note))
}

/// Formats one CSV row, refusing non-finite cells.
fn row(cells: &[f64]) -> Result<String, CliError> {
    if let Some(bad) = cells.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Numeric(format!("non-finite value {bad} in output row")));
    }
    Ok(cells.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

fn csv(header: &str, rows: Vec<String>) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

pub fn run_sweep(name: &str, ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    match name {
        "eigen-hist" => eigen_hist(ctx, args),
        "eta" => eta(ctx, args),
        "gain" => gain(ctx, args),
        "rate" => rate(ctx, args),
        "rate-coupling" => rate_coupling(ctx, args),
        "ser" => ser(ctx, args),
        "outage" => outage(ctx, args),
        other => Err(CliError::Usage(format!("unknown sweep {other:?}; expected one of {}", SWEEPS.join(", ")))),
    }
}

fn grid<A: Copy + Send + Sync, B: Copy + Send + Sync>(a: &[A], b: &[B]) -> Vec<(usize, A, B)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).enumerate().map(|(i, (x, y))| (i, x, y)).collect()
}

fn eigen_hist(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| vec![2]);
    let rs = args.r.clone().unwrap_or_else(|| lam("1lam"));
    let lambda = ctx.wavelength();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &m in &ms {
        check_counts(&[m])?;
        for r in &rs {
            let radius = r.meters(lambda);
            let seed = derive_seed(ctx.cfg.seed, "eigen-hist", (m as u64) << 32 ^ radius.to_bits());
            let h = eigen_histogram(&ctx.env, m, radius, ctx.cfg.layouts, seed)?;
            let total = (h.layouts() * m) as f64;
            for (i, (lo, hi, count)) in h.bins(HISTOGRAM_BINS).into_iter().enumerate() {
                let density = count as f64 / (total * (hi - lo));
                rows.push(row(&[m as f64, radius / lambda, (i + 1) as f64, lo, hi, count as f64, density])?);
            }
            let means: Vec<String> = h.rank_means().iter().map(|v| format!("{v:.3}")).collect();
            summary.push(format!(
                "M={m} R={:.3}lam layouts={}: mean eigenvalue by rank [{}]",
                radius / lambda,
                h.layouts(),
                means.join(", ")
            ));
        }
    }
    Ok(SweepOutput { name: "eigen-hist".into(), csv: csv("M,R,bin,bin_lower,bin_upper,count,density", rows), summary })
}

/// Least-squares slope of y on x and its standard error.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, se)
}

/// First R/λ at which the sign of a − b changes (linear interpolation).
pub fn first_crossing(x: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
    (1..d.len()).find(|&i| d[i - 1] * d[i] < 0.0 || (d[i] == 0.0 && d[i - 1] != 0.0)).map(|i| {
        let t = d[i - 1] / (d[i - 1] - d[i]);
        x[i - 1] + t * (x[i] - x[i - 1])
    })
}

/// Mean η (and its standard error) over layouts of one (M, R, ζ) point.
pub fn eta_point(
    ctx: &Context,
    m: usize,
    radius: f64,
    zeta: ZetaSpec,
    layouts: u64,
) -> Result<(f64, f64, f64), CliError> {
    let reps = if zeta == ZetaSpec::Target(0.0) { 1 } else { layouts };
    let vals: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let layout = ctx.layout(m, radius, zeta, "eta", rep)?;
            let z = layout.zeta();
            let p = ctx.point(layout, vec![1.0], true)?;
            Ok((p.eta, z))
        })
        .collect::<Result<_, CliError>>()?;
    let n = vals.len() as f64;
    let mean = vals.iter().map(|v| v.0).sum::<f64>() / n;
    let zeta_mean = vals.iter().map(|v| v.1).sum::<f64>() / n;
    let se = if vals.len() > 1 {
        (vals.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok((mean, se, zeta_mean))
}

fn eta(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| vec![100]);
    let rs = args.r.clone().unwrap_or_else(|| lam("0.5lam:5lam"));
    let zetas = args.zeta.clone().unwrap_or_else(|| vec![ZetaSpec::Target(0.0), ZetaSpec::Target(1.5)]);
    check_counts(&ms)?;
    let lambda = ctx.wavelength();
    let mut jobs = Vec::new();
    for &m in &ms {
        for &z in &zetas {
            for r in &rs {
                jobs.push((m, z, r.meters(lambda)));
            }
        }
    }
    let results: Vec<(f64, f64, f64)> =
        jobs.par_iter().map(|&(m, z, radius)| eta_point(ctx, m, radius, z, ETA_LAYOUTS)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (&(m, z, radius), &(eta, se, zeta)) in jobs.iter().zip(&results) {
        // BPP layouts have no target; -1 marks them.
        let target = match z {
            ZetaSpec::Bpp => -1.0,
            ZetaSpec::Target(t) => t,
        };
        rows.push(row(&[m as f64, radius / lambda, target, zeta, eta, se])?);
    }
    let mut summary = Vec::new();
    let x: Vec<f64> = rs.iter().map(|r| r.meters(lambda) / lambda).collect();
    let per = rs.len();
    for (mi, &m) in ms.iter().enumerate() {
        let curve = |zi: usize| -> Vec<f64> {
            let start = (mi * zetas.len() + zi) * per;
            results[start..start + per].iter().map(|v| v.0).collect()
        };
        for (zi, z) in zetas.iter().enumerate() {
            let (slope, se) = fitted_slope(&x, &curve(zi));
            summary.push(format!("M={m} zeta={}: fitted d(eta)/d(R/lam) = {slope:.4e} +/- {se:.2e}", z.label()));
        }
        if zetas.len() >= 2 {
            match first_crossing(&x, &curve(0), &curve(1)) {
                Some(c) => summary.push(format!(
                    "M={m}: curves zeta={} and zeta={} cross at R/lam = {c:.3}",
                    zetas[0].label(),
                    zetas[1].label()
                )),
                None => summary.push(format!(
                    "M={m}: curves zeta={} and zeta={} do not cross",
                    zetas[0].label(),
                    zetas[1].label()
                )),
            }
        }
    }
    Ok(SweepOutput { name: "eta".into(), csv: csv("M,R,zeta_target,zeta,eta,eta_se", rows), summary })
}

fn gain(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| counts("20:400:20"));
    let rs = args.r.clone().unwrap_or_else(|| lam("1lam,2lam,3lam"));
    let zeta = args.zeta.as_ref().map_or(ZetaSpec::Bpp, |z| z[0]);
    let (ms, note) = usable_counts(ms, 1)?;
    let lambda = ctx.wavelength();
    let reference = ctx.reference(zeta)?;
    let snr = ctx.cfg.snr_ut();
    let jobs = grid(&rs, &ms);
    let rows: Vec<String> = jobs
        .par_iter()
        .map(|&(i, r, m)| {
            let radius = r.meters(lambda);
            let layout = ctx.layout(m, radius, zeta, "gain", 0)?;
            let z = layout.zeta();
            let p = ctx.point(layout, vec![ctx.beta_1], true)?;
            let pair = SpectrumPair { tau: p.prepared.tau.clone(), tau_hat: reference.prepared.tau.clone() };
            let cf = ergodic_gain(&pair, snr, ctx.beta_1)?;
            let mc = mc_gain(
                &p.scenario,
                &reference.scenario,
                ctx.cfg.trials,
                derive_seed(ctx.cfg.seed, "trials/gain", i as u64),
            )?;
            let asym = asymptotic_gain(
                &p.scenario.a,
                &p.scenario.c,
                &reference.scenario.a,
                &reference.scenario.c,
                snr,
                ctx.beta_1,
            );
            row(&[m as f64, radius / lambda, z, cf, mc.value, mc.std_error, asym])
        })
        .collect::<Result<_, _>>()?;
    let mut summary = vec![format!(
        "beta_1 = {:.4e} (l_1 = {} m), reference M_min={} R_min={}",
        ctx.beta_1, ctx.cfg.l_1, ctx.cfg.m_min, ctx.cfg.r_min
    )];
    summary.extend(note);
    Ok(SweepOutput { name: "gain".into(), csv: csv("M,R,zeta,gain_cf,gain_mc,gain_mc_se,gain_asym", rows), summary })
}

/// Sum-rate lower bound, ZF Monte Carlo and the asymptotic value at one point.
pub fn rate_point(
    ctx: &Context,
    p: &Point,
    snr_ut: f64,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64, f64, f64), CliError> {
    let density = p.density(ctx.cfg.k)?;
    let params = p.params(snr_ut, ctx.cfg.snr_th());
    let lb: f64 = rate_lower_bound_with(&params, &density)?.iter().sum();
    let mut scn = p.scenario.clone();
    scn.snr_ut = snr_ut;
    let mc = mc_rate(&scn, SnrModel::ZeroForcing, trials, seed)?;
    let asym = asymptotic_rate_from_trace(&params, scn.trace());
    Ok((lb, mc.sum.value, mc.sum.std_error, asym))
}

fn rate(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| counts("20:300:20"));
    let rs = args.r.clone().unwrap_or_else(|| lam("1lam"));
    let zetas = args.zeta.clone().unwrap_or_else(|| vec![ZetaSpec::Bpp]);
    let (ms, note) = usable_counts(ms, ctx.cfg.k)?;
    let lambda = ctx.wavelength();
    let mut jobs = Vec::new();
    for &z in &zetas {
        for r in &rs {
            for &m in &ms {
                jobs.push((jobs.len(), z, r.meters(lambda), m));
            }
        }
    }
    let results: Vec<[f64; 7]> = jobs
        .par_iter()
        .map(|&(i, z, radius, m)| {
            let layout = ctx.layout(m, radius, z, "rate", 0)?;
            let zeta = layout.zeta();
            let p = ctx.point(layout, ctx.beta.clone(), true)?;
            let seed = derive_seed(ctx.cfg.seed, "trials/rate", i as u64);
            let (lb, mc, se, asym) = rate_point(ctx, &p, ctx.cfg.snr_ut(), ctx.cfg.trials, seed)?;
            Ok([m as f64, radius / lambda, zeta, lb, mc, se, asym])
        })
        .collect::<Result<_, CliError>>()?;
    let rows = results.iter().map(|r| row(r)).collect::<Result<_, _>>()?;
    let mut summary = Vec::new();
    for chunk in results.chunks(ms.len()) {
        let best = chunk.iter().max_by(|a, b| a[3].total_cmp(&b[3])).expect("non-empty");
        summary.push(format!(
            "R={:.3}lam: rate_lb maximal ({:.3} bit/s/Hz) at M={}; asymptotic/bound at M={}: {:.4}",
            chunk[0][1],
            best[3],
            best[0],
            chunk[chunk.len() - 1][0],
            chunk[chunk.len() - 1][6] / chunk[chunk.len() - 1][3]
        ));
    }
    summary.extend(note);
    Ok(SweepOutput { name: "rate".into(), csv: csv("M,R,zeta,rate_lb,rate_mc,rate_mc_se,rate_asym", rows), summary })
}

fn rate_coupling(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| counts("20:300:40"));
    let rs = args.r.clone().unwrap_or_else(|| lam("1lam"));
    let snrs = args.snr_db.clone().unwrap_or_else(|| vec![0.0, 5.0, 10.0, 15.0, 20.0]);
    let zeta = args.zeta.as_ref().map_or(ZetaSpec::Bpp, |z| z[0]);
    let (ms, note) = usable_counts(ms, ctx.cfg.k)?;
    let lambda = ctx.wavelength();
    let radius = rs[0].meters(lambda);
    let jobs = grid(&ms, &snrs);
    let rows: Vec<String> = jobs
        .par_iter()
        .map(|&(i, m, snr_db)| {
            let layout = ctx.layout(m, radius, zeta, "rate-coupling", 0)?;
            let zeta = layout.zeta();
            let snr = db_to_linear(snr_db);
            let seed = derive_seed(ctx.cfg.seed, "trials/rate-coupling", i as u64);
            let coupled = ctx.point(layout.clone(), ctx.beta.clone(), true)?;
            let free = ctx.point(layout, ctx.beta.clone(), false)?;
            let (lb_c, mc_c, se_c, _) = rate_point(ctx, &coupled, snr, ctx.cfg.trials, seed)?;
            let (lb_u, mc_u, se_u, _) = rate_point(ctx, &free, snr, ctx.cfg.trials, seed)?;
            row(&[m as f64, radius / lambda, zeta, snr_db, lb_c, lb_u, mc_c, se_c, mc_u, se_u])
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepOutput {
        name: "rate-coupling".into(),
        csv: csv(
            "M,R,zeta,SNR_UT_dB,rate_lb_coupled,rate_lb_uncoupled,rate_mc_coupled,rate_mc_coupled_se,rate_mc_uncoupled,rate_mc_uncoupled_se",
            rows,
        ),
        summary: std::iter::once(format!("K={} trials={}", ctx.cfg.k, ctx.cfg.trials)).chain(note).collect(),
    })
}

struct LinkAxes {
    ms: Vec<usize>,
    rs: Vec<f64>,
    snrs: Vec<f64>,
    zeta: ZetaSpec,
    note: Option<String>,
}

fn link_axes(ctx: &Context, args: &SweepArgs) -> Result<LinkAxes, CliError> {
    let ms = args.m.clone().unwrap_or_else(|| vec![20, 50, 100]);
    let (ms, note) = usable_counts(ms, ctx.cfg.k)?;
    let lambda = ctx.wavelength();
    let rs = args.r.clone().unwrap_or_else(|| lam("1lam,3lam")).iter().map(|r| r.meters(lambda)).collect();
    let snrs = args.snr_db.clone().unwrap_or_else(|| crate::axis::parse_numbers("0:15").expect("default axis"));
    let zeta = args.zeta.as_ref().map_or(ZetaSpec::Bpp, |z| z[0]);
    Ok(LinkAxes { ms, rs, snrs, zeta, note })
}

/// Closed-form and Monte Carlo SER over an SNR axis for one configuration.
/// Returns rows `[snr_db, closed, mc, mc_se, mc_zf, mc_zf_se, asym]`.
pub fn ser_curve(ctx: &Context, p: &Point, snrs: &[f64], trials: usize, seed: u64) -> Result<Vec<[f64; 7]>, CliError> {
    let density = p.density(ctx.cfg.k)?;
    let modulation = vec![Modulation::QPSK; ctx.cfg.k];
    snrs.par_iter()
        .enumerate()
        .map(|(j, &snr_db)| {
            let snr = db_to_linear(snr_db);
            let params = p.params(snr, ctx.cfg.snr_th());
            let cf = ser_closed_form_with(&params, &density)?;
            let mut scn = p.scenario.clone();
            scn.snr_ut = snr;
            let s = derive_seed(seed, "snr", j as u64);
            let mc = mc_ser(&scn, &modulation, SnrModel::Eigenvalue, trials, s)?;
            let zf = mc_ser(&scn, &modulation, SnrModel::ZeroForcing, trials, s)?;
            let asym = asymptotic_ser_from_trace(&params, scn.trace());
            Ok([snr_db, cf, mc.value, mc.std_error, zf.value, zf.std_error, asym])
        })
        .collect()
}

/// Rows `[snr_db, closed, quadrature, mc, mc_se, mc_zf, mc_zf_se]`.
pub fn outage_curve(
    ctx: &Context,
    p: &Point,
    snrs: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<[f64; 7]>, CliError> {
    let density = p.density(ctx.cfg.k)?;
    let th = ctx.cfg.snr_th();
    snrs.par_iter()
        .enumerate()
        .map(|(j, &snr_db)| {
            let snr = db_to_linear(snr_db);
            let params = p.params(snr, th);
            let cf = outage_closed_form_with(&params, &density, OutageExponent::Corrected);
            let quad = outage_quadrature_with(&params, &density)?;
            let mut scn = p.scenario.clone();
            scn.snr_ut = snr;
            let s = derive_seed(seed, "snr", j as u64);
            let mc = mc_outage(&scn, th, SnrModel::Eigenvalue, trials, s)?;
            let zf = mc_outage(&scn, th, SnrModel::ZeroForcing, trials, s)?;
            Ok([snr_db, cf, quad, mc.value, mc.std_error, zf.value, zf.std_error])
        })
        .collect()
}

fn link_sweep(ctx: &Context, args: &SweepArgs, outage: bool) -> Result<SweepOutput, CliError> {
    let ax = link_axes(ctx, args)?;
    let lambda = ctx.wavelength();
    let name = if outage { "outage" } else { "ser" };
    let jobs = grid(&ax.ms, &ax.rs);
    let blocks: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(i, m, radius)| {
            let layout = ctx.layout(m, radius, ax.zeta, name, 0)?;
            let zeta = layout.zeta();
            let p = ctx.point(layout, ctx.beta.clone(), true)?;
            let seed = derive_seed(ctx.cfg.seed, &format!("trials/{name}"), i as u64);
            let curve = if outage {
                outage_curve(ctx, &p, &ax.snrs, ctx.cfg.trials, seed)?
            } else {
                ser_curve(ctx, &p, &ax.snrs, ctx.cfg.trials, seed)?
            };
            curve
                .iter()
                .map(|c| {
                    let mut cells = vec![m as f64, radius / lambda, zeta];
                    cells.extend_from_slice(c);
                    row(&cells)
                })
                .collect()
        })
        .collect::<Result<_, CliError>>()?;
    let header = if outage {
        "M,R,zeta,SNR_UT_dB,outage_cf,outage_quad,outage_mc,outage_mc_se,outage_mc_zf,outage_mc_zf_se"
    } else {
        "M,R,zeta,SNR_UT_dB,ser_cf,ser_mc,ser_mc_se,ser_mc_zf,ser_mc_zf_se,ser_asym"
    };
    let mut summary = vec![format!("K={} trials={} QPSK", ctx.cfg.k, ctx.cfg.trials)];
    if outage {
        summary.push(format!("SNR_th = {} dB", ctx.cfg.snr_th_db));
    }
    summary.extend(ax.note.clone());
    Ok(SweepOutput { name: name.into(), csv: csv(header, blocks.into_iter().flatten().collect()), summary })
}

fn ser(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    link_sweep(ctx, args, false)
}

fn outage(ctx: &Context, args: &SweepArgs) -> Result<SweepOutput, CliError> {
    link_sweep(ctx, args, true)
}

/// Layout dump for `mimo-sim dump-layout`.
pub fn dump_layout(ctx: &Context, m: usize, r: Length, zeta: ZetaSpec) -> Result<String, CliError> {
    check_counts(&[m])?;
    let layout = ctx.layout(m, r.meters(ctx.wavelength()), zeta, "dump", 0)?;
    Ok(layout.to_csv(Some(ctx.cfg.seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_and_crossing_helpers() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let (s, se) = fitted_slope(&x, &[1.0, 3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-12 && se < 1e-12);
        let c = first_crossing(&x, &[1.0, 1.0, 1.0, 1.0], &[0.0, 0.5, 1.5, 2.0]).unwrap();
        assert!((c - 1.5).abs() < 1e-12);
        assert!(first_crossing(&x, &[1.0; 4], &[0.0; 4]).is_none());
    }

    #[test]
    fn non_finite_rows_rejected() {
        assert!(row(&[1.0, f64::NAN]).is_err());
        assert_eq!(row(&[1.0, 0.5]).unwrap(), "1,0.5");
    }
}
