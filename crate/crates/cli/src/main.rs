//! `mkit`: JSON in, JSON out.
//!
//! Exit codes: 0 success, 2 malformed input, 3 failed precondition or
//! genericity condition, 4 failed verification.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser)]
#[command(name = "mkit", version, about = "Exact normal forms of Martinet 2-forms with boundary singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct GermArgs {
    /// Polynomial JSON file.
    #[arg(short = 'f', long = "function")]
    pub function: PathBuf,
    /// Weights `m1,m2` when the support does not determine them.
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Weight system of a quasihomogeneous function.
    Weights {
        #[command(flatten)]
        germ: GermArgs,
    },
    /// Milnor numbers and monomial basis of the boundary local algebra.
    Milnor {
        #[command(flatten)]
        germ: GermArgs,
        /// Level cap for the graded elimination.
        #[arg(long)]
        cap: Option<i64>,
    },
    /// `ω = x Σ c_i(f) e_i dx∧dy + df∧dξ` with an exact certificate.
    Decompose {
        #[command(flatten)]
        germ: GermArgs,
        /// 2-form JSON file.
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, default_value_t = 32)]
        order: usize,
        /// Decompose modulo `df∧dΩ⁰` without the boundary.
        #[arg(long)]
        ordinary: bool,
    },
    /// Morse normalizer from `--c`, or the full normal form of `(ω, f)`.
    Normalize {
        #[arg(short = 'f', long = "function", requires = "omega", conflicts_with = "c")]
        function: Option<PathBuf>,
        #[arg(long, requires = "function")]
        omega: Option<PathBuf>,
        /// Series JSON file with `c(0) = 1`.
        #[arg(long, required_unless_present = "function")]
        c: Option<PathBuf>,
        /// `±1` in `x ± y²` for `--c`.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
        #[arg(long, default_value_t = 32)]
        order: usize,
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Normal form class and functional invariant of `L = (α, f)`.
    Classify {
        /// 1-form JSON file.
        #[arg(long)]
        alpha: PathBuf,
        #[arg(short = 'f', long = "function")]
        function: PathBuf,
        #[arg(long, default_value_t = 32)]
        order: usize,
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Checks `t V′ = c V₀` on a grid by quadrature.
    FluxCheck {
        #[arg(long)]
        c: PathBuf,
        /// `a:b:n`, `n` points from `a` to `b`.
        #[arg(long, default_value = "0.1:1:10")]
        grid: String,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Relative central difference step.
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
    },
    /// Rechecks a report produced by this tool.
    Verify {
        report: PathBuf,
    },
}

fn run(cli: Cli) -> Result<serde_json::Value, Failure> {
    match cli.command {
        Command::Weights { germ } => commands::weights(&germ),
        Command::Milnor { germ, cap } => commands::milnor(&germ, cap),
        Command::Decompose { germ, omega, order, ordinary } => commands::decompose(&germ, &omega, order, ordinary),
        Command::Normalize { function, omega, c, sign, order, cap } => match (function, omega, c) {
            (Some(f), Some(o), _) => commands::normalize_pair(&f, &o, order, cap),
            (_, _, Some(c)) => commands::normalize_series(&c, sign, cap),
            _ => Err(Failure::malformed("normalize needs --c, or -f with --omega")),
        },
        Command::Classify { alpha, function, order, cap } => commands::classify(&alpha, &function, order, cap),
        Command::FluxCheck { c, grid, nodes, tol, fd_step } => commands::flux_check(&c, &grid, nodes, tol, fd_step),
        Command::Verify { report } => commands::verify(&report),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", commands::render(&report));
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(report) = &failure.report {
                println!("{}", commands::render(report));
            }
            eprintln!("mkit: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
