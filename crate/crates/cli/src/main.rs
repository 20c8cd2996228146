//! `expmoment` command-line front end. Every subcommand prints a JSON
//! document `{status, payload, diagnostics}` on stdout and echoes the
//! diagnostics on stderr. Exit codes: 0 pass, 1 mathematical failure,
//! 2 usage or input-format error.

mod commands;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "expmoment", version, about = "Exponential moments, Hankel certificates and moment recovery")]
pub struct Cli {
    /// Use exact rational arithmetic where the inputs are rational.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Floating PSD tolerance ε (eigenvalues ≥ −ε·max(1, trace)).
    #[arg(long, global = true, default_value_t = expmoment::hankel::DEFAULT_EPSILON)]
    pub tolerance: f64,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct LambdaArg {
    /// Comma-separated frequencies, e.g. `1,2,3,4` or `1/2,3/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate Φ or one of its derivatives.
    Phi {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Derivative order.
        #[arg(long, default_value_t = 0)]
        deriv: usize,
        /// Also print the Taylor coefficients a_N..=a_{N+terms}.
        #[arg(long)]
        series: bool,
        #[arg(long, default_value_t = expmoment::expcore::DEFAULT_SERIES_TERMS)]
        terms: usize,
    },
    /// Evaluate the basis b_0(x), ..., b_N(x).
    Basis {
        #[command(flatten)]
        lambda: LambdaArg,
        /// Point of evaluation; a rational literal in exact mode.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Exponential moments of a measure given as a JSON file.
    Moments {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long)]
        measure: PathBuf,
    },
    /// Certify that the basis values form a moment sequence.
    Check {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// `halfline` or `unit-interval`.
        #[arg(long, default_value = "halfline")]
        region: String,
        #[arg(long, default_value_t = expmoment::hankel::DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Chammam's closed-form Hankel determinant.
    Chammam {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        m: usize,
        /// Compare against the exact determinant.
        #[arg(long)]
        verify: bool,
    },
    /// Build one Hankel form of a moment sequence and test its positivity.
    Hankel {
        /// JSON moment sequence file.
        #[arg(long, conflicts_with = "values")]
        moments: Option<PathBuf>,
        /// Comma-separated moment values.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        /// `Q1`, `Q2` or `Q3`.
        #[arg(long, default_value = "Q1")]
        form: String,
        /// Matrix index; the largest admissible one when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Recover an atomic representing measure from a moment sequence file.
    Recover {
        #[arg(long)]
        moments: PathBuf,
        /// Overrides the domain recorded in the file.
        #[arg(long)]
        domain: Option<String>,
    },
    /// Exponential moments of a measure, their solvability and a recovered measure.
    Verify {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value = "halfline")]
        domain: String,
    },
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Failure,
}

#[derive(Serialize, Debug)]
pub struct CommandResult {
    pub status: Status,
    pub payload: serde_json::Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn success(payload: impl Serialize) -> anyhow::Result<Self> {
        Ok(Self { status: Status::Success, payload: serde_json::to_value(payload)?, diagnostics: Vec::new() })
    }

    /// Success or failure according to `pass`; failures get a diagnostic.
    pub fn verdict(pass: bool, payload: impl Serialize, reasons: Vec<String>) -> anyhow::Result<Self> {
        let mut out = Self::success(payload)?;
        if !pass {
            out.status = Status::Failure;
            out.diagnostics = if reasons.is_empty() { vec!["check failed".into()] } else { reasons };
        }
        Ok(out)
    }

    fn failure(message: String) -> Self {
        Self { status: Status::Failure, payload: serde_json::Value::Null, diagnostics: vec![message] }
    }
}

/// Errors in user input rather than in the mathematics; they exit with 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<expmoment::Error>() {
        Some(expmoment::Error::Parse(_)) => 2,
        _ => 1,
    }
}

fn emit(result: &CommandResult, output: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(result).expect("results serialize") + "\n";
    match output {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, code) = match commands::run(&cli) {
        Ok(r) => {
            let code = if r.status == Status::Success { 0 } else { 1 };
            (r, code)
        }
        Err(e) => (CommandResult::failure(format!("{e:#}")), exit_code(&e)),
    };
    for line in &result.diagnostics {
        eprintln!("expmoment: {line}");
    }
    if let Err(e) = emit(&result, cli.output.as_ref()) {
        eprintln!("expmoment: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
