use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use expmoment::expcore::{self, PhiSeries};
use expmoment::hankel::{self, CheckOptions, HankelForm, HankelMatrix, PsdReport, Region, Theorem1Report};
use expmoment::measures::{self, Domain, Measure, MomentSequence};
use expmoment::numerics::{self, parse_rational, Rational};
use expmoment::recover;
use expmoment::Frequencies;

use crate::{Cli, Command, CommandResult, UsageError};

pub fn run(cli: &Cli) -> Result<CommandResult> {
    match &cli.command {
        Command::Phi { lambda, x, deriv, series, terms } => phi(cli, &lambda.lambda, *x, *deriv, *series, *terms),
        Command::Basis { lambda, x } => basis(cli, &lambda.lambda, x),
        Command::Moments { lambda, measure } => moments(cli, &lambda.lambda, measure),
        Command::Check { lambda, x, region, grid_points } => check(cli, &lambda.lambda, *x, region, *grid_points),
        Command::Chammam { alpha, beta, m, verify } => chammam(alpha, beta, *m, *verify),
        Command::Hankel { moments, values, form, k } => {
            hankel_cmd(cli, moments.as_deref(), values.as_deref(), form, *k)
        }
        Command::Recover { moments, domain } => recover_cmd(cli, moments, domain.as_deref()),
        Command::Verify { lambda, measure, domain } => verify(cli, &lambda.lambda, measure, domain),
    }
}

fn frequencies(cli: &Cli, text: &str) -> Result<Frequencies> {
    let freq = Frequencies::parse_list(text)?;
    if cli.exact {
        if freq.exact().is_none() {
            return Err(UsageError(format!("--exact needs rational frequencies, got {text:?}")).into());
        }
        Ok(freq)
    } else {
        Ok(Frequencies::new(freq.values().to_vec())?)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())).into())
}

fn parse_f64(name: &str, text: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| UsageError(format!("--{name}: {text:?} is not a number")).into())
}

fn parse_domain(text: &str) -> Result<Domain> {
    Domain::parse(text).map_err(|e| UsageError(e.to_string()).into())
}

#[derive(Serialize)]
struct PhiPayload {
    lambda: Vec<f64>,
    x: f64,
    deriv: usize,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<PhiSeries>,
}

fn phi(cli: &Cli, lambda: &str, x: f64, deriv: usize, series: bool, terms: usize) -> Result<CommandResult> {
    let freq = frequencies(cli, lambda)?;
    let value = expcore::eval_phi_deriv(&freq, deriv, x)?;
    let series = if series { Some(expcore::taylor_coeffs(&freq, freq.order() + terms)?) } else { None };
    CommandResult::success(PhiPayload { lambda: freq.values().to_vec(), x, deriv, value, series })
}

fn basis(cli: &Cli, lambda: &str, x: &str) -> Result<CommandResult> {
    let freq = frequencies(cli, lambda)?;
    if cli.exact {
        let x = parse_rational(x).map_err(|e| UsageError(format!("--x: {e}")))?;
        CommandResult::success(expcore::eval_basis_exact(&freq, &x)?)
    } else {
        CommandResult::success(expcore::eval_basis(&freq, parse_f64("x", x)?)?)
    }
}

fn moments(cli: &Cli, lambda: &str, path: &Path) -> Result<CommandResult> {
    let freq = frequencies(cli, lambda)?;
    let mu: Measure = read_json(path)?;
    CommandResult::success(measures::exp_moments(&freq, &mu)?)
}

fn check(cli: &Cli, lambda: &str, x: f64, region: &str, grid_points: usize) -> Result<CommandResult> {
    let freq = frequencies(cli, lambda)?;
    let region = Region::parse(region)?;
    let opts = CheckOptions { exact: cli.exact, epsilon: cli.tolerance, grid_points, max_derivative: None };
    let report = hankel::theorem1_check(&freq, x, region, &opts)?;
    let reasons = check_failures(&report);
    CommandResult::verdict(report.pass, report, reasons)
}

fn check_failures(report: &Theorem1Report) -> Vec<String> {
    let mut out = Vec::new();
    if !report.hypothesis.pass {
        out.push(format!(
            "Φ^({}) takes the negative value {:e} at x = {}",
            report.hypothesis.min_order, report.hypothesis.min_value, report.hypothesis.min_x
        ));
    }
    for c in report.checks.iter().filter(|c| !c.report.is_psd) {
        out.push(format!("Hankel form indefinite at k={} ({})", c.k, c.form));
    }
    out
}

#[derive(Serialize)]
struct ChammamPayload {
    alpha: String,
    beta: String,
    m: usize,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    det: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equal: Option<bool>,
}

fn chammam(alpha: &str, beta: &str, m: usize, verify: bool) -> Result<CommandResult> {
    let a = parse_rational(alpha).context("--alpha")?;
    let b = parse_rational(beta).context("--beta")?;
    let value = hankel::chammam_det(&a, &b, m)?;
    let det = if verify { Some(numerics::exact_det(&hankel::chammam_matrix(&a, &b, m)?)) } else { None };
    let equal = det.as_ref().map(|d| *d == value);
    let payload = ChammamPayload {
        alpha: a.to_string(),
        beta: b.to_string(),
        m,
        value: value.to_string(),
        det: det.map(|d| d.to_string()),
        equal,
    };
    let reasons = vec!["product formula and determinant differ".to_string()];
    CommandResult::verdict(equal != Some(false), payload, reasons)
}

#[derive(Serialize)]
struct HankelPayload {
    form: HankelForm,
    k: usize,
    matrix: HankelMatrix,
    report: PsdReport,
}

enum Values {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

fn hankel_values(cli: &Cli, file: Option<&Path>, list: Option<&str>) -> Result<Values> {
    if let Some(path) = file {
        let seq: MomentSequence = read_json(path)?;
        return Ok(match seq.exact().filter(|_| cli.exact) {
            Some(v) => Values::Exact(v.to_vec()),
            None => Values::Float(seq.values().to_vec()),
        });
    }
    let text = list.ok_or_else(|| UsageError("one of --moments or --values is required".into()))?;
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let exact: Option<Vec<Rational>> = parts.iter().map(|p| parse_rational(p).ok()).collect();
    match exact.filter(|_| cli.exact) {
        Some(v) => Ok(Values::Exact(v)),
        None => Ok(Values::Float(parts.iter().map(|p| parse_f64("values", p)).collect::<Result<_>>()?)),
    }
}

fn hankel_cmd(
    cli: &Cli,
    file: Option<&Path>,
    list: Option<&str>,
    form: &str,
    k: Option<usize>,
) -> Result<CommandResult> {
    let form = HankelForm::parse(form)?;
    let values = hankel_values(cli, file, list)?;
    let len = match &values {
        Values::Exact(v) => v.len(),
        Values::Float(v) => v.len(),
    };
    let k = match k {
        Some(k) => k,
        None => form.max_k(len).ok_or_else(|| UsageError(format!("{len} values are too few for {form}")))?,
    };
    let (matrix, report) = match values {
        Values::Exact(v) => {
            let m = hankel::build_hankel_exact(&v, k, form)?;
            let r = hankel::psd_check_exact(&m)?;
            (HankelMatrix::Exact(m), r)
        }
        Values::Float(v) => {
            let m = hankel::build_hankel(&v, k, form)?;
            let r = hankel::psd_check(&m, cli.tolerance)?;
            (HankelMatrix::Float(m), r)
        }
    };
    let reasons = vec![format!("Hankel form indefinite at k={k} ({form})")];
    CommandResult::verdict(report.is_psd, HankelPayload { form, k, matrix, report }, reasons)
}

fn recover_cmd(cli: &Cli, path: &Path, domain: Option<&str>) -> Result<CommandResult> {
    let mut seq: MomentSequence = read_json(path)?;
    if let Some(d) = domain {
        seq = seq.with_domain(parse_domain(d)?);
    }
    let nu = recover::recover_measure_with(&seq, cli.tolerance)?;
    CommandResult::success(nu)
}

fn verify(cli: &Cli, lambda: &str, path: &Path, domain: &str) -> Result<CommandResult> {
    let freq = frequencies(cli, lambda)?;
    let mu: Measure = read_json(path)?;
    let domain = parse_domain(domain)?;
    let report = recover::verify_transfer_with(&freq, &mu, domain, cli.tolerance)?;
    let reasons = report.diagnostics.clone();
    CommandResult::verdict(report.pass, report, reasons)
}
