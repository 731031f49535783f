use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mimo_sim::axis::{parse_counts, parse_lengths, parse_numbers};
use mimo_sim::sweeps::{dump_layout, run_sweep, SweepArgs, SWEEPS};
use mimo_sim::validate::run_validation;
use mimo_sim::{CliError, Context, ExperimentConfig, Length, ZetaSpec};

const THREADS_ENV: &str = "MIMO_SIM_THREADS";

#[derive(Parser, Debug)]
#[command(name = "mimo-sim", version, about = "Sweeps and validation for the compact-array massive MIMO simulator")]
struct Cli {
    /// INI-style configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable), e.g. --set K=4.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (default: MIMO_SIM_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a sweep and write its CSV.
    Run {
        /// One of: eigen-hist, eta, gain, rate, rate-coupling, ser, outage.
        sweep: String,
        #[arg(long = "M", value_name = "AXIS")]
        m: Option<String>,
        #[arg(long = "R", value_name = "AXIS")]
        r: Option<String>,
        #[arg(long, value_name = "LIST")]
        zeta: Option<String>,
        #[arg(long, value_name = "AXIS")]
        snr: Option<String>,
        /// Output CSV path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print a report.
    Validate {
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        sabotage: Option<usize>,
    },
    /// Write the antenna positions of one layout.
    DumpLayout {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "R")]
        r: String,
        #[arg(long, default_value = "bpp")]
        zeta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.set("trials", &t.to_string())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn thread_count(cli: &Cli) -> Result<Option<usize>, CliError> {
    let n = match cli.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    Ok(n)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    if let Command::Run { sweep, .. } = &cli.command {
        if !SWEEPS.contains(&sweep.as_str()) {
            return Err(CliError::Usage(format!("unknown sweep {sweep:?}; expected one of {}", SWEEPS.join(", "))));
        }
    }
    let ctx = Context::new(cfg)?;
    match &cli.command {
        Command::Run { sweep, m, r, zeta, snr, out } => {
            let args = SweepArgs {
                m: m.as_deref().map(parse_counts).transpose()?,
                r: r.as_deref().map(parse_lengths).transpose()?,
                zeta: zeta.as_deref().map(ZetaSpec::parse_list).transpose()?,
                snr_db: snr.as_deref().map(parse_numbers).transpose()?,
            };
            let result = run_sweep(sweep, &ctx, &args)?;
            emit(&result.csv, out.as_deref())?;
            for line in &result.summary {
                eprintln!("{line}");
            }
            Ok(())
        }
        Command::Validate { only, out, sabotage } => {
            let report = run_validation(&ctx, only, *sabotage)?;
            let text = report.render();
            if out.is_some() {
                emit(&text, out.as_deref())?;
            }
            print!("{text}");
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<String> =
                    report.results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
                Err(CliError::Validation(format!("criteria {} failed", failed.join(", "))))
            }
        }
        Command::DumpLayout { m, r, zeta, out } => {
            let r = Length::parse(r)?;
            let zs = ZetaSpec::parse_list(zeta)?;
            if zs.len() != 1 {
                return Err(CliError::Usage("dump-layout takes a single zeta".into()));
            }
            emit(&dump_layout(&ctx, *m, r, zs[0])?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = thread_count(&cli).and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| execute(&cli))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mimo-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
