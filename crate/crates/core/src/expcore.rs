//! The exponential space spanned by `e^{λ_0 x}, ..., e^{λ_N x}`.
//!
//! `Φ_Λ` is the element with `Φ^(j)(0) = 0` for `j < N` and `Φ^(N)(0) = 1`.
//! It equals the divided difference of `t ↦ e^{tx}` over the frequencies,
//! which gives two evaluation routes:
//!
//! - closed form `Φ^(d)(x) = Σ_i w_i λ_i^d e^{λ_i x}` with barycentric weights
//!   `w_i = 1 / Π_{k≠i} (λ_i − λ_k)`;
//! - Taylor series `Φ(x) = Σ_{s≥N} a_s x^s` with `a_s = h_{s−N}(Λ) / s!`,
//!   `h_m` the complete homogeneous symmetric polynomial.
//!
//! The closed form is used whenever it is well conditioned. Near `x = 0` or
//! for tightly clustered frequencies its terms cancel, and the series (all
//! terms positive when `λ ≥ 0`, `x ≥ 0`) takes over.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numerics::{self, complete_homogeneous_table, factorial, parse_rational, Rational};
use crate::{Error, Result};

/// Minimum relative gap between frequencies.
pub const MIN_RELATIVE_GAP: f64 = 1e-8;
/// Default number of Taylor terms beyond `a_N`.
pub const DEFAULT_SERIES_TERMS: usize = 60;
/// Hard cap on Taylor terms beyond `a_N` for the automatically extended series.
pub const MAX_SERIES_TERMS: usize = 400;

// Closed-form result is accepted when Σ|terms| ≤ this multiple of |value|.
const WELL_CONDITIONED: f64 = 1e4;
const MAX_EXPONENT: f64 = 709.0;

/// Pairwise distinct real frequencies `λ_0..λ_N` with `N` odd.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequencies {
    values: Vec<f64>,
    exact: Option<Vec<Rational>>,
    weights: Vec<f64>,
}

impl Frequencies {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidFrequencies("at least two frequencies are required".into()));
        }
        if (values.len() - 1).is_multiple_of(2) {
            return Err(Error::InvalidFrequencies(format!(
                "N = {} must be odd (an even number of frequencies)",
                values.len() - 1
            )));
        }
        let weights = barycentric_weights(&values)?;
        Ok(Self { values, exact: None, weights })
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        let floats = values.iter().map(numerics::to_f64).collect();
        let mut freq = Self::new(floats)?;
        for i in 0..values.len() {
            if values[i + 1..].contains(&values[i]) {
                return Err(Error::RepeatedFrequencies { gap: 0.0, threshold: 0.0 });
            }
        }
        freq.exact = Some(values);
        Ok(freq)
    }

    /// Comma-separated list. When every entry is a rational literal
    /// (`"3/2"`, `"0.25"`, `"4"`) the exact representation is kept too.
    pub fn parse_list(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        match parts.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>>>() {
            Ok(exact) => Self::from_rationals(exact),
            Err(_) => {
                let floats = parts
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad frequency {p:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::new(floats)
            }
        }
    }

    /// `N`, the highest index.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct FrequenciesJson {
    lambda: Vec<NumberOrText>,
}

impl Serialize for Frequencies {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let lambda = match &self.exact {
            Some(exact) => exact.iter().map(|r| NumberOrText::Text(r.to_string())).collect(),
            None => self.values.iter().map(|&v| NumberOrText::Number(v)).collect(),
        };
        FrequenciesJson { lambda }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frequencies {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = FrequenciesJson::deserialize(d)?;
        let all_text = raw.lambda.iter().all(|v| matches!(v, NumberOrText::Text(_)));
        let built = if all_text {
            raw.lambda
                .iter()
                .map(|v| match v {
                    NumberOrText::Text(t) => parse_rational(t),
                    NumberOrText::Number(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()
                .and_then(Frequencies::from_rationals)
        } else {
            raw.lambda
                .iter()
                .map(|v| match v {
                    NumberOrText::Number(x) => Ok(*x),
                    NumberOrText::Text(t) => parse_rational(t).map(|r| numerics::to_f64(&r)),
                })
                .collect::<Result<Vec<_>>>()
                .and_then(Frequencies::new)
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// `w_j = 1 / Π_{i≠j} (λ_j − λ_i)`; any number of nodes, distinct.
pub fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    if nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidFrequencies("frequencies must be finite".into()));
    }
    let scale = nodes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = MIN_RELATIVE_GAP * scale;
    let mut min_gap = f64::INFINITY;
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            min_gap = min_gap.min((a - b).abs());
        }
    }
    if nodes.len() > 1 && (min_gap <= threshold || min_gap == 0.0) {
        return Err(Error::RepeatedFrequencies { gap: min_gap, threshold });
    }
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(j, &lj)| {
            let prod: f64 = nodes.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &li)| lj - li).product();
            1.0 / prod
        })
        .collect())
}

/// A derivative value together with `Σ |terms|` of the route that produced
/// it; rounding error is of order `f64::EPSILON · magnitude`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub magnitude: f64,
}

fn check_exponent(freq: &Frequencies, x: f64) -> Result<()> {
    let worst = freq.values.iter().map(|l| l * x).fold(f64::NEG_INFINITY, f64::max);
    if !x.is_finite() || worst > MAX_EXPONENT {
        return Err(Error::Overflow(worst));
    }
    Ok(())
}

pub fn phi_deriv_closed_form(freq: &Frequencies, order: usize, x: f64) -> Result<Evaluation> {
    check_exponent(freq, x)?;
    let (mut value, mut magnitude) = (0.0, 0.0);
    for (&l, &w) in freq.values.iter().zip(&freq.weights) {
        let term = w * l.powi(order as i32) * (l * x).exp();
        value += term;
        magnitude += term.abs();
    }
    Ok(Evaluation { value, magnitude })
}

pub fn phi_deriv_series(freq: &Frequencies, order: usize, x: f64) -> Result<Evaluation> {
    check_exponent(freq, x)?;
    let n = freq.order();
    let scale = freq.max_abs();
    let scaled: Vec<f64> = freq.values.iter().map(|l| l / scale).collect();
    let lx = scale * x;
    let max_m = (2.0 * lx.abs()).ceil() as usize + 80 + order;
    let h = complete_homogeneous_table(&scaled, max_m);

    // term_m = h_m(Λ/L) · L^{d−N} · (Lx)^p / p!,  p = m + N − d
    let first_m = order.saturating_sub(n);
    let first_p = first_m + n - order;
    let mut q = (1..=first_p).fold(1.0, |acc, k| acc * lx / k as f64);
    let prefactor = scale.powi(order as i32 - n as i32);
    let (mut value, mut magnitude) = (0.0f64, 0.0f64);
    for (m, hm) in h.iter().enumerate().skip(first_m) {
        let p = m + n - order;
        if m > first_m {
            q *= lx / p as f64;
        }
        let term = prefactor * hm * q;
        value += term;
        magnitude += term.abs();
        if p as f64 > lx.abs() && (term.abs() <= 1e-17 * magnitude || magnitude == 0.0 && q == 0.0) {
            return Ok(Evaluation { value, magnitude });
        }
    }
    Err(Error::SeriesTruncation { terms: max_m + 1 })
}

/// `Φ^(order)(x)` with the route whose rounding scale is smaller.
pub fn phi_deriv_evaluation(freq: &Frequencies, order: usize, x: f64) -> Result<Evaluation> {
    let closed = phi_deriv_closed_form(freq, order, x)?;
    if closed.magnitude <= WELL_CONDITIONED * closed.value.abs() {
        return Ok(closed);
    }
    match phi_deriv_series(freq, order, x) {
        Ok(series) if series.magnitude < closed.magnitude => Ok(series),
        _ => Ok(closed),
    }
}

pub fn eval_phi(freq: &Frequencies, x: f64) -> Result<f64> {
    eval_phi_deriv(freq, 0, x)
}

pub fn eval_phi_deriv(freq: &Frequencies, order: usize, x: f64) -> Result<f64> {
    phi_deriv_evaluation(freq, order, x).map(|e| e.value)
}

/// Taylor coefficients `a_N..=a_{s_max}` of `Φ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiSeries {
    pub lambda: Vec<f64>,
    pub start: usize,
    pub coeffs: SeriesCoeffs,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SeriesCoeffs {
    Exact(#[serde(with = "numerics::serde_rational::vec")] Vec<Rational>),
    Float(Vec<f64>),
}

impl SeriesCoeffs {
    pub fn len(&self) -> usize {
        match self {
            SeriesCoeffs::Exact(v) => v.len(),
            SeriesCoeffs::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            SeriesCoeffs::Exact(v) => v.iter().map(numerics::to_f64).collect(),
            SeriesCoeffs::Float(v) => v.clone(),
        }
    }

    pub fn all_nonnegative(&self) -> bool {
        match self {
            SeriesCoeffs::Exact(v) => v.iter().all(|r| !r.is_negative()),
            SeriesCoeffs::Float(v) => v.iter().all(|&a| a >= 0.0),
        }
    }
}

impl PhiSeries {
    pub fn coefficient(&self, s: usize) -> Option<f64> {
        if s < self.start {
            return Some(0.0);
        }
        self.coeffs.to_f64().get(s - self.start).copied()
    }

    /// Partial sum `Σ a_s x^s`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.to_f64().iter().enumerate().map(|(i, a)| a * x.powi((self.start + i) as i32)).sum()
    }
}

/// `a_s = h_{s−N}(Λ) / s!` for `N ≤ s ≤ s_max`, exact when the frequencies are.
pub fn taylor_coeffs(freq: &Frequencies, s_max: usize) -> Result<PhiSeries> {
    let n = freq.order();
    if s_max < n {
        return Err(Error::IndexRange(format!("s_max = {s_max} is below N = {n}")));
    }
    let top = s_max - n;
    let coeffs = match freq.exact() {
        Some(exact) => {
            let h = complete_homogeneous_table(exact, top);
            let mut inv_fact = Rational::one() / factorial(n as u32);
            let mut out = Vec::with_capacity(top + 1);
            for (m, hm) in h.iter().enumerate() {
                if m > 0 {
                    inv_fact /= Rational::from_integer(((n + m) as i64).into());
                }
                out.push(hm * &inv_fact);
            }
            SeriesCoeffs::Exact(out)
        }
        None => {
            let scale = freq.max_abs();
            let scaled: Vec<f64> = freq.values.iter().map(|l| l / scale).collect();
            let h = complete_homogeneous_table(&scaled, top);
            // c_m = L^m / (m+N)!
            let mut c = 1.0 / (1..=n).map(|k| k as f64).product::<f64>();
            let mut out = Vec::with_capacity(top + 1);
            for (m, hm) in h.iter().enumerate() {
                if m > 0 {
                    c *= scale / (n + m) as f64;
                }
                out.push(hm * c);
            }
            SeriesCoeffs::Float(out)
        }
    };
    Ok(PhiSeries { lambda: freq.values.clone(), start: n, coeffs })
}

/// `(b_0(x), ..., b_N(x))` with `b_j = j! Φ^(N−j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpBasisValues {
    pub lambda: Vec<f64>,
    pub x: f64,
    pub values: Vec<f64>,
}

pub fn eval_basis(freq: &Frequencies, x: f64) -> Result<ExpBasisValues> {
    let n = freq.order();
    let mut values = Vec::with_capacity(n + 1);
    let mut j_fact = 1.0;
    for j in 0..=n {
        if j > 0 {
            j_fact *= j as f64;
        }
        values.push(j_fact * eval_phi_deriv(freq, n - j, x)?);
    }
    Ok(ExpBasisValues { lambda: freq.values.clone(), x, values })
}

/// Rational basis values from the truncated series
/// `b_j(x) = j! Σ_{m=0}^{M} h_m(Λ) x^{m+j} / (m+j)!`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactBasisValues {
    #[serde(with = "numerics::serde_rational")]
    pub x: Rational,
    #[serde(with = "numerics::serde_rational::vec")]
    pub values: Vec<Rational>,
    /// Number of Taylor terms kept beyond `a_N`.
    pub terms: usize,
    /// Size of the first omitted term of `b_0`, relative to `b_0`.
    pub tail_estimate: f64,
}

/// Truncation `M` at which the next term of `b_0` is below `1e-16` of the
/// partial sum, starting at [`DEFAULT_SERIES_TERMS`] and capped at
/// [`MAX_SERIES_TERMS`].
fn series_truncation(freq: &Frequencies, x: f64) -> Result<(usize, f64)> {
    let scale = freq.max_abs();
    let scaled: Vec<f64> = freq.values.iter().map(|l| l / scale).collect();
    let h = complete_homogeneous_table(&scaled, MAX_SERIES_TERMS + 1);
    let lx = scale * x.abs();
    let mut q = 1.0;
    let mut partial = 0.0;
    let mut terms = Vec::with_capacity(h.len());
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            q *= lx / m as f64;
        }
        partial += (hm * q).abs();
        terms.push(((hm * q).abs(), partial));
    }
    let mut m = DEFAULT_SERIES_TERMS;
    while m <= MAX_SERIES_TERMS {
        let (next, _) = terms[m + 1];
        let (_, sum) = terms[m];
        let tail = if sum > 0.0 { next / sum } else { 0.0 };
        if m as f64 >= lx && tail <= 1e-16 {
            return Ok((m, tail));
        }
        m += 20;
    }
    Err(Error::SeriesTruncation { terms: MAX_SERIES_TERMS })
}

pub fn eval_basis_exact(freq: &Frequencies, x: &Rational) -> Result<ExactBasisValues> {
    let exact =
        freq.exact().ok_or_else(|| Error::InvalidFrequencies("exact evaluation needs rational frequencies".into()))?;
    let xf = numerics::to_f64(x);
    check_exponent(freq, xf)?;
    let (terms, tail_estimate) = series_truncation(freq, xf)?;
    let n = freq.order();
    let h = complete_homogeneous_table(exact, terms);

    let mut powers = Vec::with_capacity(terms + n + 1);
    let mut inv_fact = Vec::with_capacity(terms + n + 1);
    let (mut p, mut f) = (Rational::one(), Rational::one());
    for k in 0..=terms + n {
        if k > 0 {
            p *= x;
            f /= Rational::from_integer((k as i64).into());
        }
        powers.push(p.clone());
        inv_fact.push(f.clone());
    }
    let mut values = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut acc = Rational::zero();
        for (m, hm) in h.iter().enumerate() {
            if hm.is_zero() || powers[m + j].is_zero() {
                continue;
            }
            acc += hm * &powers[m + j] * &inv_fact[m + j];
        }
        values.push(acc * factorial(j as u32));
    }
    Ok(ExactBasisValues { x: x.clone(), values, terms, tail_estimate })
}

/// Result of sampling `Φ^(j)(x) ≥ 0` over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiPositivityReport {
    pub min_value: f64,
    pub min_order: usize,
    pub min_x: f64,
    /// Relative tolerance applied against each value's rounding scale.
    pub tolerance: f64,
    pub samples: usize,
    pub coeffs_checked: usize,
    pub coeffs_nonnegative: bool,
    pub pass: bool,
}

pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

pub fn check_phi_positivity(freq: &Frequencies, j_max: usize, grid: &[f64]) -> Result<PhiPositivityReport> {
    if !freq.all_nonnegative() {
        return Err(Error::Domain("derivative positivity requires nonnegative frequencies".into()));
    }
    if let Some(bad) = grid.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::Domain(format!("grid point {bad} is not a nonnegative real")));
    }
    let mut report = PhiPositivityReport {
        min_value: f64::INFINITY,
        min_order: 0,
        min_x: f64::NAN,
        tolerance: POSITIVITY_TOLERANCE,
        samples: 0,
        coeffs_checked: 0,
        coeffs_nonnegative: true,
        pass: true,
    };
    for &x in grid {
        for order in 0..=j_max {
            let e = phi_deriv_evaluation(freq, order, x)?;
            report.samples += 1;
            if e.value < report.min_value {
                report.min_value = e.value;
                report.min_order = order;
                report.min_x = x;
            }
            if e.value < -POSITIVITY_TOLERANCE * e.magnitude {
                report.pass = false;
            }
        }
    }
    let series = taylor_coeffs(freq, freq.order() + DEFAULT_SERIES_TERMS)?;
    report.coeffs_checked = series.coeffs.len();
    report.coeffs_nonnegative = series.coeffs.all_nonnegative();
    report.pass &= report.coeffs_nonnegative;
    Ok(report)
}

/// `count` points log-spaced in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 0 || hi < lo {
        return Vec::new();
    }
    if count == 1 || hi == lo {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, ratio};
    use std::f64::consts::E;

    fn freq(v: &[f64]) -> Frequencies {
        Frequencies::new(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn weights_examples() {
        assert_eq!(barycentric_weights(&[1.0, 2.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(barycentric_weights(&[0.0, 1.0, 2.0]).unwrap(), vec![0.5, -1.0, 0.5]);
        let w = barycentric_weights(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = [-1.0 / 6.0, 0.5, -0.5, 1.0 / 6.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(barycentric_weights(&[1.0, 1.0]), Err(Error::RepeatedFrequencies { .. })));
    }

    #[test]
    fn weight_moments_follow_divided_differences() {
        let nodes = [0.5, 1.25, 2.0, 3.5];
        let w = barycentric_weights(&nodes).unwrap();
        let n = nodes.len() - 1;
        let h = complete_homogeneous_table(&nodes, 4);
        for m in 0..n + 4 {
            let s: f64 = w.iter().zip(&nodes).map(|(w, l)| w * l.powi(m as i32)).sum();
            let expected = if m < n { 0.0 } else { h[m - n] };
            assert!((s - expected).abs() < 1e-12 * expected.abs().max(1.0), "m={m}: {s}");
        }
    }

    #[test]
    fn frequency_validation() {
        assert!(Frequencies::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(Frequencies::new(vec![1.0]).is_err());
        let err = Frequencies::parse_list("1,1").unwrap_err();
        assert!(err.to_string().contains("pairwise distinct"));
        assert!(Frequencies::new(vec![1.0, 1.0 + 1e-12]).is_err());
        let f = Frequencies::parse_list("1/2, 3, 0.25, 7").unwrap();
        assert_eq!(f.exact().unwrap()[0], ratio(1, 2));
        assert_eq!(f.values()[2], 0.25);
        let g = Frequencies::parse_list("1.5,2.25").unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn phi_examples() {
        let f12 = freq(&[1.0, 2.0]);
        assert_eq!(eval_phi(&f12, 0.0).unwrap(), 0.0);
        assert!(close(eval_phi(&f12, 1.0).unwrap(), E * E - E, 1e-14));
        assert!((eval_phi(&f12, 1.0).unwrap() - 4.670774270).abs() < 1e-9);
        let f1234 = freq(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eval_phi(&f1234, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_derivative_examples() {
        let f12 = freq(&[1.0, 2.0]);
        assert_eq!(eval_phi_deriv(&f12, 1, 0.0).unwrap(), 1.0);
        let v = eval_phi_deriv(&f12, 1, 1.0).unwrap();
        assert!(close(v, 2.0 * E * E - E, 1e-14));
        assert!((v - 12.059830).abs() < 1e-6);
        let f1234 = freq(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eval_phi_deriv(&f1234, 2, 0.0).unwrap(), 0.0);
        assert_eq!(eval_phi_deriv(&f1234, 3, 0.0).unwrap(), 1.0);
        // order above N: h_1(Λ) = 10
        assert!(close(eval_phi_deriv(&f1234, 4, 0.0).unwrap(), 10.0, 1e-14));
    }

    #[test]
    fn overflow_reported() {
        let f = freq(&[1.0, 800.0]);
        assert!(matches!(eval_phi(&f, 1.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn closed_form_and_series_agree_when_both_are_accurate() {
        let f = freq(&[0.3, 1.1, 2.5, 4.0]);
        for &x in &[0.25, 1.0, 2.0, 3.0] {
            for d in 0..6 {
                let a = phi_deriv_closed_form(&f, d, x).unwrap().value;
                let b = phi_deriv_series(&f, d, x).unwrap().value;
                assert!((a - b).abs() <= 1e-11 * b.abs(), "d={d} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn series_path_handles_clustered_frequencies() {
        // weights ~ 1e8 with Φ(x) ~ x^3/6 e^{x}: closed form loses half the digits
        let f = freq(&[1.0, 1.01, 1.02, 1.03]);
        let x = 0.5;
        let v = eval_phi(&f, x).unwrap();
        let reference = phi_deriv_series(&f, 0, x).unwrap().value;
        assert_eq!(v, reference);
        // confluent limit e^{x} x^3/6 with nodes near 1.015
        let approx = (1.015f64 * x).exp() * x.powi(3) / 6.0;
        assert!((v - approx).abs() < 1e-3 * approx);
    }

    #[test]
    fn taylor_examples() {
        let exact = Frequencies::parse_list("1,2").unwrap();
        let s = taylor_coeffs(&exact, 4).unwrap();
        match &s.coeffs {
            SeriesCoeffs::Exact(c) => {
                assert_eq!(c[0], rat(1));
                assert_eq!(c[1], ratio(3, 2));
                // oracle: (2^s - 1)/s!
                assert_eq!(c[2], ratio(7, 6));
                assert_eq!(c[3], ratio(15, 24));
            }
            _ => panic!("expected exact coefficients"),
        }
        let f1234 = Frequencies::parse_list("1,2,3,4").unwrap();
        let s = taylor_coeffs(&f1234, 3).unwrap();
        assert_eq!(s.coeffs, SeriesCoeffs::Exact(vec![ratio(1, 6)]));

        let float = freq(&[1.0, 2.0]);
        let s = taylor_coeffs(&float, 3).unwrap().coeffs.to_f64();
        assert!((s[0] - 1.0).abs() < 1e-15 && (s[1] - 1.5).abs() < 1e-15);
        assert!(taylor_coeffs(&float, 0).is_err());
    }

    #[test]
    fn series_matches_closed_form() {
        let f = freq(&[0.5, 1.5, 2.0, 3.25]);
        let series = taylor_coeffs(&f, f.order() + 120).unwrap();
        for &x in &[0.0, 0.5, 1.0, 2.0, 3.0] {
            let a = eval_phi(&f, x).unwrap();
            let b = series.eval(x);
            assert!((a - b).abs() <= 1e-10 * a.abs().max(f64::MIN_POSITIVE), "x={x}");
        }
    }

    #[test]
    fn basis_examples() {
        let f1234 = freq(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eval_basis(&f1234, 0.0).unwrap().values, vec![1.0, 0.0, 0.0, 0.0]);
        let b = eval_basis(&freq(&[1.0, 2.0]), 1.0).unwrap().values;
        assert!((b[0] - 12.059830).abs() < 1e-6 && (b[1] - 4.670774).abs() < 1e-6);
        assert_eq!(eval_basis(&freq(&[1.0, 2.0]), 0.0).unwrap().values, vec![1.0, 0.0]);
    }

    #[test]
    fn exact_basis_tracks_float_basis() {
        let f = Frequencies::parse_list("1,2,3,4").unwrap();
        let at0 = eval_basis_exact(&f, &rat(0)).unwrap();
        assert_eq!(at0.values, vec![rat(1), rat(0), rat(0), rat(0)]);
        let x = ratio(1, 2);
        let exact = eval_basis_exact(&f, &x).unwrap();
        let float = eval_basis(&f, 0.5).unwrap();
        for (e, v) in exact.values.iter().zip(&float.values) {
            assert!((numerics::to_f64(e) - v).abs() <= 1e-13 * v.abs());
        }
        assert!(exact.tail_estimate <= 1e-16);
    }

    #[test]
    fn positivity_examples() {
        let f12 = freq(&[1.0, 2.0]);
        let r = check_phi_positivity(&f12, 3, &[0.1, 1.0, 5.0]).unwrap();
        assert!(r.pass && r.min_value > 0.0);
        let r = check_phi_positivity(&freq(&[1.0, 2.0, 3.0, 4.0]), 5, &[0.5]).unwrap();
        assert!(r.pass);
        let r = check_phi_positivity(&f12, 0, &[0.0]).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_value, 0.0);
        assert!(check_phi_positivity(&freq(&[-1.0, 2.0]), 2, &[1.0]).is_err());
    }

    #[test]
    fn frequencies_json() {
        let f: Frequencies = serde_json::from_str(r#"{"lambda": [1.0, 2.0, 3.0, 4.0]}"#).unwrap();
        assert_eq!(f.order(), 3);
        assert!(f.exact().is_none());
        let g: Frequencies = serde_json::from_str(r#"{"lambda": ["1/2", "3"]}"#).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"lambda":["1/2","3"]}"#);
        assert!(serde_json::from_str::<Frequencies>(r#"{"lambda": [1.0, 1.0]}"#).is_err());
    }
}
