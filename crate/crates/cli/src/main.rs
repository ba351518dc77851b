//! `nhs`: command-line front end for the nonharmonic toolkit.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonharmonic::{Basis, Error};

use commands::Failure;
use config::{CoefficientInput, Decimal, ExperimentConfig, OperatorInput};

#[derive(Parser)]
#[command(name = "nhs", version, about = "Nonharmonic Fourier analysis on the unit square")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the invariant suite at the configured h, K and n.
    Validate,
    /// Classify ∂₁ + c∂₂ (or scan a general operator's symbol).
    Diagnose,
    /// Solve Pw = f for f read from a grid (.csv/.bin) or spectral (.json) file.
    Solve { input: Option<PathBuf> },
    /// Reduce ∂₁ + a(x₁)∂₂ to its mean and check the intertwining.
    Normalform,
    /// Convert between grid samples and coefficients.
    Transform { input: Option<PathBuf> },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    L,
    Lstar,
}

#[derive(Args)]
struct Flags {
    /// JSON configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    h1: Option<f64>,
    #[arg(long, global = true)]
    h2: Option<f64>,
    /// Real part of c, read as an exact decimal literal.
    #[arg(long = "c-re", global = true, allow_hyphen_values = true)]
    c_re: Option<String>,
    #[arg(long = "c-im", global = true, allow_hyphen_values = true)]
    c_im: Option<f64>,
    /// Operator shorthand such as "d1 + (0.5+1.2i) d2".
    #[arg(long, global = true)]
    operator: Option<String>,
    /// Coefficient a(x₁): a .json/.csv path or inline JSON `{mean, modes}`.
    #[arg(long, global = true)]
    a: Option<String>,
    /// Truncation K.
    #[arg(long = "K", global = true)]
    k: Option<usize>,
    /// Grid size n (n × n nodes).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Comma-separated shell radii.
    #[arg(long, global = true, value_delimiter = ',')]
    radii: Option<Vec<i64>>,
    #[arg(long, global = true)]
    qmax: Option<u64>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long = "zero-tol", global = true)]
    zero_tol: Option<f64>,
    #[arg(long = "growth-guard", global = true)]
    growth_guard: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    basis: Option<BasisArg>,
    /// Output directory for reports, curves and fields.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Flags {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<(), Error> {
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { cfg.$field = v; })* };
        }
        set!(h1, h2, c_im, k, n, radii, qmax, threshold, tol, trials, seed);
        if let Some(v) = self.c_re {
            cfg.c_re = Decimal::Text(v);
        }
        if let Some(v) = self.operator {
            cfg.operator = Some(OperatorInput::Shorthand(v));
        }
        if let Some(v) = self.a {
            cfg.a = Some(if v.trim_start().starts_with('{') {
                CoefficientInput::Series(serde_json::from_str(&v)?)
            } else {
                CoefficientInput::Path(v.into())
            });
        }
        if self.zero_tol.is_some() {
            cfg.zero_tol = self.zero_tol;
        }
        if self.growth_guard.is_some() {
            cfg.growth_guard = self.growth_guard;
        }
        if let Some(b) = self.basis {
            cfg.basis = match b {
                BasisArg::L => Basis::L,
                BasisArg::Lstar => Basis::Lstar,
            };
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        Ok(())
    }
}

fn threads_from_env() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NHS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::from(Error::Parse(format!("NHS_THREADS: `{v}` is not a positive integer"))))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Invariant(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    threads_from_env()?;
    let mut cfg = match &cli.flags.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cli.flags.apply(&mut cfg)?;
    if let Cmd::Solve { input: Some(p) } | Cmd::Transform { input: Some(p) } = &cli.cmd {
        cfg.input = Some(p.clone());
    }
    cfg.validate()?;
    match cli.cmd {
        Cmd::Validate => commands::validate(&cfg),
        Cmd::Diagnose => commands::diagnose(&cfg),
        Cmd::Solve { .. } => commands::solve(&cfg),
        Cmd::Normalform => commands::normalform(&cfg),
        Cmd::Transform { .. } => commands::transform(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nhs: {f}");
            ExitCode::from(f.code())
        }
    }
}
