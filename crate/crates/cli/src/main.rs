//! `divconv`: exact and asymptotic divisor-convolution experiments.
//!
//! Exit codes: 0 on success (verification mismatches are reported as FAIL rows),
//! 1 for invalid arguments, 2 when a computation or the output write fails.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use divconv::asymptotic::ApproxConfig;
use divconv::Error;

use commands::{Identity, KloostermanCheck, LemmaCheck};
use output::{emit, Format, Report};

#[derive(Parser, Debug)]
#[command(name = "divconv", version, about = "Additive divisor convolutions and their asymptotics")]
struct Cli {
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// σ_a(n) for n = 1..=N, or a single n.
    Sigma {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long = "N", default_value_t = 100)]
        limit: u64,
        #[arg(long)]
        n: Option<u64>,
    },
    /// S_{a,b}(n) for n = 1..=N, or a single n.
    Convolve {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long = "N", default_value_t = 100)]
        limit: u64,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Exhaustive exact check of a convolution identity.
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long = "N", default_value_t = 2000)]
        limit: u64,
    },
    /// Twisted Kloosterman decomposition, Weil bound, or normalized-size sweep.
    Kloosterman {
        #[arg(long, value_enum)]
        check: KloostermanCheck,
        /// Largest modulus d (or q for the Weil check).
        #[arg(long = "d-max", default_value_t = 300)]
        d_max: u64,
        /// Parameters run over 1..=param-max (default 10, or 3 for the Weil check).
        #[arg(long = "param-max")]
        param_max: Option<i64>,
    },
    /// Multi-term asymptotic expansion of S_{a,b}(n).
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        n: u64,
        #[arg(long = "d-max", default_value_t = ApproxConfig::default().d_max)]
        d_max: u64,
    },
    /// Residuals of the expansion on a geometric grid, with a log-log fit.
    ErrorScan {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// lo:hi:count
        #[arg(long, default_value = "256:8192:11", value_parser = parse_grid)]
        grid: (u64, u64, usize),
        #[arg(long = "d-max", default_value_t = ApproxConfig::default().d_max)]
        d_max: u64,
    },
    /// Truncated-sum and tail-bound checks.
    Lemmas {
        #[arg(long, value_enum, default_value = "all")]
        check: LemmaCheck,
    },
    /// D(n) and its density experiment for n = 2..=N.
    StsDensity {
        #[arg(long = "N", default_value_t = 30_000)]
        limit: u64,
    },
}

fn parse_grid(s: &str) -> Result<(u64, u64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected lo:hi:count, got {s:?}");
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    let count = parts[2].parse().map_err(|_| bad())?;
    if lo >= hi || count < 2 {
        return Err(format!("grid needs lo < hi and count >= 2, got {s:?}"));
    }
    Ok((lo, hi, count))
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LimitOutOfRange { .. }
            | Error::OutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::ExponentMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::BernoulliIndex { .. }
            | Error::Pole
            | Error::Regime(_)
            | Error::Divergent { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("RC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Compute(e.to_string()))
}

fn approx(d_max: u64) -> Result<ApproxConfig, Failure> {
    let cfg = ApproxConfig {
        d_max,
        ..ApproxConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write<R: Report>(r: Result<R, Failure>, cli: &Cli) -> Result<(), Failure> {
    emit(&r?, cli.format, cli.output.as_deref()).map_err(|e| Failure::Compute(format!("write failed: {e}")))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    use commands::*;
    match cli.command {
        Command::Sigma { a, limit, n } => write(sigma_cmd(a, limit, n).map_err(Failure::from), cli),
        Command::Convolve { a, b, limit, n } => write(convolve_cmd(a, b, limit, n).map_err(Failure::from), cli),
        Command::Verify { identity, limit } => write(verify_cmd(identity, limit).map_err(Failure::from), cli),
        Command::Kloosterman { check, d_max, param_max } => {
            let p = param_max.unwrap_or(if check == KloostermanCheck::Weil { 3 } else { 10 });
            if d_max == 0 || p < 1 {
                return Err(Failure::Usage("d-max and param-max must be positive".into()));
            }
            write(Ok(kloosterman_cmd(check, d_max, p)), cli)
        }
        Command::Expand { a, b, n, d_max } => {
            let cfg = approx(d_max)?;
            write(expand_cmd(a, b, n, &cfg).map_err(Failure::from), cli)
        }
        Command::ErrorScan { a, b, grid, d_max } => {
            let cfg = approx(d_max)?;
            write(error_scan_cmd(a, b, grid, &cfg).map_err(Failure::from), cli)
        }
        Command::Lemmas { check } => write(lemmas_cmd(check).map_err(Failure::from), cli),
        Command::StsDensity { limit } => {
            let r = sts_density_cmd(limit).map_err(Failure::from)?;
            eprintln!(
                "target={} final_cesaro={}",
                output::f17(r.target.0),
                output::f17(r.final_cesaro.0)
            );
            write(Ok(r), cli)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
