//! Command-line front end for the `oapoly` library.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check
//! fails (the report is still written), 2 for malformed input or usage.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "oapoly",
    version,
    about = "Orthogonally additive polynomials on convolution algebras"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "OAPOLY_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Override the command's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multiplication tables and irreps.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Fourier transform on a group algebra.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Orthogonal additivity.
    #[command(subcommand)]
    Oadd(OaddCmd),
    /// Representing maps P(f) = Φ(fⁿ).
    #[command(subcommand)]
    Represent(RepresentCmd),
    /// Certificate-backed decomposition norm bounds.
    #[command(subcommand)]
    Norms(NormsCmd),
    /// Fejér kernels and divergence diagnostics on the circle.
    #[command(subcommand)]
    Circle(CircleCmd),
    /// Run every invariant suite.
    Selftest,
}

#[derive(Args, Debug, Clone)]
pub struct GroupSource {
    /// Builtin group: trivial, zN, dN, s3, s4, q8.
    #[arg(long, conflicts_with = "group_file")]
    pub group: Option<String>,

    /// Group JSON file with multiplication table and irreps.
    #[arg(long)]
    pub group_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Check the group axioms and the irrep registry.
    Validate(GroupSource),
    /// Order, irreps and character table.
    Info(GroupSource),
}

#[derive(Subcommand, Debug)]
pub enum FourierCmd {
    /// Transform an element (or a seeded random one) and check the round trip.
    Transform {
        #[command(flatten)]
        source: GroupSource,
        /// Element JSON `{"group", "values"}`; random when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Σ_π trace(f̂(π)ⁿ)
    TracePower,
    /// Σ_π (trace f̂(π))ⁿ
    BlockTracePower,
    /// f(e)ⁿ
    TotalTracePower,
}

#[derive(Args, Debug, Clone)]
pub struct PolySource {
    /// Polynomial JSON file.
    #[arg(long, conflicts_with = "model")]
    pub poly: Option<PathBuf>,

    /// Builtin model polynomial over the group algebra.
    #[arg(long, value_enum)]
    pub model: Option<Model>,

    /// Degree of the model polynomial.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Full,
    CrossIdeal,
}

#[derive(Subcommand, Debug)]
pub enum OaddCmd {
    /// Test P(f+g) = P(f) + P(g) on generated orthogonal pairs.
    Check {
        #[command(flatten)]
        source: GroupSource,
        #[command(flatten)]
        poly: PolySource,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = SuiteArg::Full)]
        suite: SuiteArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum RepresentCmd {
    /// Extract Φ through the group path and cross-check it.
    Extract {
        #[command(flatten)]
        source: GroupSource,
        #[command(flatten)]
        poly: PolySource,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Check P(f) = Φ(fⁿ) for a supplied Φ.
    Verify {
        #[command(flatten)]
        source: GroupSource,
        #[command(flatten)]
        poly: PolySource,
        /// Linear map JSON as written by `represent extract`.
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Rank of the span of n-th convolution powers.
    Span {
        #[command(flatten)]
        source: GroupSource,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    Pn,
    Sn,
}

#[derive(Subcommand, Debug)]
pub enum NormsCmd {
    /// Emit a verified upper-bound certificate, or verify a supplied one.
    Certify {
        #[command(flatten)]
        source: GroupSource,
        /// Element JSON; random when absent.
        #[arg(long, conflicts_with = "verify")]
        input: Option<PathBuf>,
        /// Certificate JSON to verify instead of building one.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = CertKind::Pn)]
        kind: CertKind,
        /// l1, lP, linf, ag or spP.
        #[arg(long, default_value = "l1")]
        norm: String,
        /// Random refinement steps for the polarization route.
        #[arg(long, default_value_t = 0)]
        refine: usize,
    },
    /// lower ≤ sn ≤ pn ≤ (nⁿ/n!)·sn on random elements.
    Chain {
        #[command(flatten)]
        source: GroupSource,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    #[value(name = "4.1")]
    Ca11,
    #[value(name = "4.2")]
    Ca12,
    #[value(name = "4.3")]
    Linf,
}

#[derive(Subcommand, Debug)]
pub enum CircleCmd {
    /// Mass of F_m and the limit φ(χ_k, F_m, …, F_m) → Φ₀(χ_k).
    Fejer {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 10, 50])]
        m: Vec<usize>,
        /// Frequency k of the probe χ_k (weight w_k = 1).
        #[arg(long, default_value_t = 5)]
        k: i64,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Divergence diagnostics of the three counterexamples.
    Diagnose {
        #[arg(long, value_enum)]
        example: Example,
        /// Exponent p: in (1,2) for 4.1, at least 2 for 4.2.
        #[arg(long, conflicts_with = "q")]
        p: Option<f64>,
        /// Conjugate exponent q for 4.2.
        #[arg(long)]
        q: Option<f64>,
        /// Truncation list for 4.1.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        /// Truncation list for 4.2 and 4.3.
        #[arg(long = "n", value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// 4.1 with ĥ supported at 0 only.
        #[arg(long)]
        control: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            if let Err(e) = io::emit(&cli, &out.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(body) = &e.report {
                if let Err(e) = io::emit(&cli, body) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(e.code)
        }
    }
}
