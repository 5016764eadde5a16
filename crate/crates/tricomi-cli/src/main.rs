//! `tricomi`: constant tables, inequality checks, eigen-solves, bound checks
//! and SVG plots for the Tricomi problem on the normal domain.

mod commands;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tricomi", version, about = "Verification tools for the Tricomi operator on the normal Tricomi domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of the x0-dependent constants.
    #[command(allow_negative_numbers = true)]
    Constants(Common),
    /// Check one of the univariate claims on a dense grid.
    #[command(allow_negative_numbers = true)]
    Verify {
        claim: Claim,
        #[command(flatten)]
        common: Common,
        /// Run the check on a target built to fail (starshape only).
        #[arg(long)]
        negative_control: bool,
        /// Seed of the random states used by `integrands`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the discrete eigenproblem and report the smallest pairs.
    #[command(allow_negative_numbers = true)]
    Eigen {
        #[command(flatten)]
        common: Common,
        /// Write the principal eigenfunction: CSV nodes if the path ends in
        /// `.csv`, otherwise the binary raster.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Raster columns of the binary export; rows follow the aspect ratio.
        #[arg(long, default_value_t = 200)]
        raster: usize,
    },
    /// Pohozaev identity and eigenfunction bound for the principal pair.
    #[command(allow_negative_numbers = true)]
    Bound(Common),
    /// Static SVG of h, the domain outline, or the principal eigenfunction.
    #[command(allow_negative_numbers = true)]
    Plot {
        what: PlotKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Vertex abscissa, negative.
    #[arg(long, value_parser = parse_x0, conflicts_with = "x0_range")]
    pub x0: Option<f64>,
    /// Log-spaced sweep `a:b:n` with `a, b < 0`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub x0_range: Option<(f64, f64, usize)>,
    /// Grid size: sample count for `verify`, cells across AB for `eigen`, `bound`, `plot eigen`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Mesh cells across AB (overrides `--grid`).
    #[arg(long)]
    pub nx: Option<usize>,
    /// Cartesian rows up to the apex of sigma.
    #[arg(long)]
    pub ny: Option<usize>,
    /// Eigenpairs for `eigen`; flow times for `verify starshape`; random bundles for `verify integrands`.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override for the pass/fail decision.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    #[value(name = "lemma4.5", alias = "h-profile")]
    Lemma45,
    #[value(name = "cor4.6", alias = "g1-bounds")]
    Cor46,
    #[value(name = "cor4.8", alias = "g2-bounds")]
    Cor48,
    #[value(name = "starshape", alias = "star-shaped")]
    Starshape,
    #[value(name = "integrands")]
    Integrands,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    H,
    Domain,
    Eigen,
}

fn parse_x0(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v < 0.0 && v.is_finite()) {
        return Err(format!("x0 must be finite and negative, got {s}"));
    }
    Ok(v)
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n, got {s}"));
    }
    let a = parse_x0(parts[0])?;
    let b = parse_x0(parts[1])?;
    let n: usize = parts[2].parse().map_err(|e| format!("bad count: {e}"))?;
    if n == 0 {
        return Err("sweep count must be at least 1".into());
    }
    Ok((a, b, n))
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("TRICOMI_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (common, result) = match cli.command {
        Command::Constants(c) => (c.clone(), commands::constants(&c)),
        Command::Verify { claim, common, negative_control, seed } => {
            (common.clone(), commands::verify(claim, &common, negative_control, seed))
        }
        Command::Eigen { common, export, raster } => (common.clone(), commands::eigen(&common, export.as_deref(), raster)),
        Command::Bound(c) => (c.clone(), commands::bound(&c)),
        Command::Plot { what, common } => (common.clone(), commands::plot(what, &common)),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&common, &out.body) {
                eprintln!("{}", commands::diagnostic("io", &e.to_string(), &[]));
                return ExitCode::from(1);
            }
            if out.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}", commands::diagnostic("check_failed", "one or more checks did not pass", &out.failures));
                ExitCode::from(1)
            }
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(commands::Failure::Run(e)) => {
            eprintln!("{}", commands::diagnostic(commands::error_kind(&e), &e.to_string(), &[]));
            ExitCode::from(1)
        }
    }
}

fn emit(common: &Common, body: &str) -> std::io::Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, body),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(body.as_bytes())?;
            o.flush()
        }
    }
}
