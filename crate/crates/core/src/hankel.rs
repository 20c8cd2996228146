//! Hankel forms of a sequence and their positivity certificates.
//!
//! Three forms are built from a sequence `c`:
//!
//! | form | entry `(i, j)`            | size bound   |
//! |------|---------------------------|--------------|
//! | Q1   | `c_{i+j}`                 | `2k ≤ m`     |
//! | Q2   | `c_{i+j+1}`               | `2k+1 ≤ m`   |
//! | Q3   | `c_{i+j} − c_{i+j+1}`     | `2k+1 ≤ m`   |
//!
//! Q1 and Q2 together characterize moment sequences on `[0, ∞)`, Q2 and Q3
//! moment sequences on `[0, 1]`.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::expcore::{self, Frequencies, PhiPositivityReport};
use crate::numerics::{
    self, exact_det, factorial, ldl_psd, leading_principal_minors, pochhammer, Rational, RationalMatrix,
};
use crate::{Error, Result};

/// Default relative tolerance for floating PSD checks.
pub const DEFAULT_EPSILON: f64 = 1e-10;
/// Sample count for the derivative-positivity hypothesis.
pub const DEFAULT_GRID_POINTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HankelForm {
    #[serde(rename = "Q1")]
    Plain,
    #[serde(rename = "Q2")]
    Shifted,
    #[serde(rename = "Q3")]
    Differenced,
}

impl HankelForm {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "q1" | "plain" => Ok(HankelForm::Plain),
            "q2" | "shifted" => Ok(HankelForm::Shifted),
            "q3" | "differenced" => Ok(HankelForm::Differenced),
            other => Err(Error::Parse(format!("unknown Hankel form {other:?}"))),
        }
    }

    /// Smallest sequence length admitting a `(k+1) × (k+1)` form.
    pub fn required_len(self, k: usize) -> usize {
        match self {
            HankelForm::Plain => 2 * k + 1,
            HankelForm::Shifted | HankelForm::Differenced => 2 * k + 2,
        }
    }

    /// Largest `k` for a sequence of the given length.
    pub fn max_k(self, len: usize) -> Option<usize> {
        match self {
            HankelForm::Plain => len.checked_sub(1).map(|m| m / 2),
            _ => len.checked_sub(2).map(|m| m / 2),
        }
    }
}

impl fmt::Display for HankelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HankelForm::Plain => "Q1",
            HankelForm::Shifted => "Q2",
            HankelForm::Differenced => "Q3",
        })
    }
}

fn check_len(len: usize, k: usize, form: HankelForm) -> Result<()> {
    if len < form.required_len(k) {
        return Err(Error::IndexRange(format!(
            "{form} with k = {k} needs {} sequence entries, got {len}",
            form.required_len(k)
        )));
    }
    Ok(())
}

pub fn build_hankel_exact(seq: &[Rational], k: usize, form: HankelForm) -> Result<RationalMatrix> {
    check_len(seq.len(), k, form)?;
    Ok(RationalMatrix::from_fn(k + 1, |i, j| match form {
        HankelForm::Plain => seq[i + j].clone(),
        HankelForm::Shifted => seq[i + j + 1].clone(),
        HankelForm::Differenced => &seq[i + j] - &seq[i + j + 1],
    }))
}

pub fn build_hankel(seq: &[f64], k: usize, form: HankelForm) -> Result<DMatrix<f64>> {
    check_len(seq.len(), k, form)?;
    Ok(DMatrix::from_fn(k + 1, k + 1, |i, j| match form {
        HankelForm::Plain => seq[i + j],
        HankelForm::Shifted => seq[i + j + 1],
        HankelForm::Differenced => seq[i + j] - seq[i + j + 1],
    }))
}

pub fn quadratic_form_exact(m: &RationalMatrix, p: &[Rational]) -> Result<Rational> {
    if p.len() != m.order() {
        return Err(Error::Dimension { expected: m.order(), found: p.len() });
    }
    let mut acc = Rational::zero();
    for (i, pi) in p.iter().enumerate() {
        for (j, pj) in p.iter().enumerate() {
            acc += pi * pj * m.get(i, j);
        }
    }
    Ok(acc)
}

pub fn quadratic_form(m: &DMatrix<f64>, p: &[f64]) -> Result<f64> {
    if p.len() != m.nrows() || !m.is_square() {
        return Err(Error::Dimension { expected: m.nrows(), found: p.len() });
    }
    let v = nalgebra::DVector::from_column_slice(p);
    Ok(v.dot(&(m * &v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Floating,
}

/// Outcome of a positive-(semi)definiteness test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdReport {
    pub mode: CheckMode,
    pub is_psd: bool,
    pub is_pd: bool,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_minors")]
    pub minors: Option<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eig: Option<f64>,
    /// Absolute eigenvalue threshold; zero in exact mode.
    pub tolerance: f64,
}

fn serialize_minors<S: serde::Serializer>(m: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(v) => numerics::serde_rational::vec::serialize(v, s),
        None => s.serialize_none(),
    }
}

/// Exact certificate: PD by Sylvester's leading-minor criterion, PSD and
/// rank by the symmetric-pivoted LDLᵀ factorization.
pub fn psd_check_exact(m: &RationalMatrix) -> Result<PsdReport> {
    let minors = leading_principal_minors(m)?;
    let ldl = ldl_psd(m)?;
    let is_pd = minors.iter().all(|d| d.is_positive());
    Ok(PsdReport {
        mode: CheckMode::Exact,
        is_psd: ldl.is_psd,
        is_pd: is_pd && ldl.is_psd,
        rank: ldl.rank,
        minors: Some(minors),
        min_eig: None,
        tolerance: 0.0,
    })
}

/// Floating certificate: smallest eigenvalue against `−ε · max(1, trace)`.
pub fn psd_check(m: &DMatrix<f64>, epsilon: f64) -> Result<PsdReport> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.nrows(), found: m.ncols() });
    }
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    if n == 0 {
        return Ok(PsdReport {
            mode: CheckMode::Floating,
            is_psd: true,
            is_pd: true,
            rank: 0,
            minors: None,
            min_eig: None,
            tolerance: 0.0,
        });
    }
    let eigen = nalgebra::SymmetricEigen::new(m.clone());
    let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let tolerance = epsilon * m.trace().max(1.0);
    Ok(PsdReport {
        mode: CheckMode::Floating,
        is_psd: min_eig >= -tolerance,
        is_pd: min_eig > tolerance,
        rank: eigen.eigenvalues.iter().filter(|&&e| e > tolerance).count(),
        minors: None,
        min_eig: Some(min_eig),
        tolerance,
    })
}

/// Either representation of a Hankel form.
#[derive(Clone, Debug, PartialEq)]
pub enum HankelMatrix {
    Exact(RationalMatrix),
    Float(DMatrix<f64>),
}

impl HankelMatrix {
    pub fn certify(&self, epsilon: f64) -> Result<PsdReport> {
        match self {
            HankelMatrix::Exact(m) => psd_check_exact(m),
            HankelMatrix::Float(m) => psd_check(m, epsilon),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            HankelMatrix::Exact(m) => m.to_f64(),
            HankelMatrix::Float(m) => m.clone(),
        }
    }
}

impl Serialize for HankelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            HankelMatrix::Exact(m) => m
                .rows()
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .serialize(s),
            HankelMatrix::Float(m) => {
                (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
            }
        }
    }
}

fn chammam_denominator_check(alpha: &Rational, beta: &Rational, m: usize) -> Result<()> {
    let one = Rational::one();
    for k in 0..=m as u32 {
        if pochhammer(&(alpha + beta + Rational::from_integer(k.into())), k).is_zero() {
            return Err(Error::ZeroDivision(format!("(α+β+{k})_{k} vanishes")));
        }
        if pochhammer(&(&one + alpha + beta), 2 * k).is_zero() {
            return Err(Error::ZeroDivision(format!("(1+α+β)_{} vanishes", 2 * k)));
        }
    }
    Ok(())
}

/// Closed-form value of `det_{0≤i,j≤m} [(α)_{i+j} / (1+α+β)_{i+j}]`:
/// `Π_{k=0}^{m} k! (α)_k (1+β)_k / ((α+β+k)_k (1+α+β)_{2k})`.
pub fn chammam_det(alpha: &Rational, beta: &Rational, m: usize) -> Result<Rational> {
    chammam_denominator_check(alpha, beta, m)?;
    let one = Rational::one();
    let mut acc = Rational::one();
    for k in 0..=m as u32 {
        let num = factorial(k) * pochhammer(alpha, k) * pochhammer(&(&one + beta), k);
        let den = pochhammer(&(alpha + beta + Rational::from_integer(k.into())), k)
            * pochhammer(&(&one + alpha + beta), 2 * k);
        acc *= num / den;
    }
    Ok(acc)
}

/// The `(m+1) × (m+1)` matrix `[(α)_{i+j} / (1+α+β)_{i+j}]`.
pub fn chammam_matrix(alpha: &Rational, beta: &Rational, m: usize) -> Result<RationalMatrix> {
    let base = Rational::one() + alpha + beta;
    let mut seq = Vec::with_capacity(2 * m + 1);
    for r in 0..=2 * m as u32 {
        let den = pochhammer(&base, r);
        if den.is_zero() {
            return Err(Error::ZeroDivision(format!("(1+α+β)_{r} vanishes")));
        }
        seq.push(pochhammer(alpha, r) / den);
    }
    build_hankel_exact(&seq, m, HankelForm::Plain)
}

/// `H̃_{N,k,s}(x)` with entries `(i+j)! · s!/(s−N+i+j)! · x^{i+j}`: the
/// contribution of the monomial `x^s` of `Φ` to the Q1 form.
pub fn monomial_hankel(n: usize, k: usize, s: usize, x: &Rational) -> Result<RationalMatrix> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidFrequencies(format!("N = {n} must be odd")));
    }
    if s < n {
        return Err(Error::IndexRange(format!("s = {s} is below N = {n}")));
    }
    let shift = s - n;
    let s_fact = factorial(s as u32);
    let mut seq = Vec::with_capacity(2 * k + 1);
    let mut power = Rational::one();
    for r in 0..=2 * k {
        if r > 0 {
            power *= x;
        }
        seq.push(factorial(r as u32) * &s_fact / factorial((shift + r) as u32) * &power);
    }
    build_hankel_exact(&seq, k, HankelForm::Plain)
}

/// `x^{k(k+1)} (s!/S!)^{k+1} · chammam_det(1, S−1, k)` with `S = s − N`,
/// the closed form of `det H̃_{N,k,s}(x)`.
pub fn monomial_hankel_det_closed_form(n: usize, k: usize, s: usize, x: &Rational) -> Result<Rational> {
    if s < n {
        return Err(Error::IndexRange(format!("s = {s} is below N = {n}")));
    }
    let shift = s - n;
    let ratio = factorial(s as u32) / factorial(shift as u32);
    let beta = Rational::from_integer((shift as i64 - 1).into());
    let x_part = num_traits::pow(x.clone(), k * (k + 1));
    let ratio_part = num_traits::pow(ratio, k + 1);
    Ok(x_part * ratio_part * chammam_det(&Rational::one(), &beta, k)?)
}

/// Differenced monomial entry `m!/(S+m+1)! · (S + (1−x)(m+1))`.
pub fn monomial_difference_entry(shift: usize, m: usize, x: &Rational) -> Rational {
    let one = Rational::one();
    let s = Rational::from_integer((shift as i64).into());
    let m1 = Rational::from_integer(((m + 1) as i64).into());
    factorial(m as u32) / factorial((shift + m + 1) as u32) * (s + (one - x) * m1)
}

/// Where the basis values are certified as moments: the half-line or `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Halfline,
    UnitInterval,
}

impl Region {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "halfline" | "half-line" => Ok(Region::Halfline),
            "unit-interval" | "unit_interval" | "interval" => Ok(Region::UnitInterval),
            other => Err(Error::Parse(format!("unknown region {other:?}"))),
        }
    }

    /// Forms certified for a sequence of order `N`, as `(k, form)` pairs.
    pub fn forms(self, n: usize) -> Vec<(usize, HankelForm)> {
        let mut out = Vec::new();
        match self {
            Region::Halfline => {
                out.extend((0..).take_while(|k| 2 * k <= n).map(|k| (k, HankelForm::Plain)));
                out.extend((0..).take_while(|k| 2 * k < n).map(|k| (k, HankelForm::Shifted)));
            }
            Region::UnitInterval => {
                out.extend((0..).take_while(|k| 2 * k < n).map(|k| (k, HankelForm::Shifted)));
                out.extend((0..).take_while(|k| 2 * k < n).map(|k| (k, HankelForm::Differenced)));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub exact: bool,
    pub epsilon: f64,
    pub grid_points: usize,
    /// Highest derivative order sampled for the hypothesis; `2N+1` when unset.
    pub max_derivative: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { exact: false, epsilon: DEFAULT_EPSILON, grid_points: DEFAULT_GRID_POINTS, max_derivative: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormCheck {
    pub k: usize,
    pub form: HankelForm,
    pub matrix: HankelMatrix,
    #[serde(flatten)]
    pub report: PsdReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub region: Region,
    pub x: f64,
    pub basis: Vec<f64>,
    pub hypothesis: PhiPositivityReport,
    pub checks: Vec<FormCheck>,
    pub pass: bool,
}

fn prepare(freq: &Frequencies, x: f64, region: Region) -> Result<()> {
    if !freq.all_positive() {
        return Err(Error::Domain("certification requires positive frequencies".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x = {x} must be nonnegative")));
    }
    if region == Region::UnitInterval && x > 1.0 {
        return Err(Error::Domain("x outside [0,1]".into()));
    }
    Ok(())
}

fn hypothesis(freq: &Frequencies, x: f64, opts: &CheckOptions) -> Result<PhiPositivityReport> {
    let grid = if x > 1e-3 { expcore::log_grid(1e-3, x, opts.grid_points) } else { vec![x] };
    let j_max = opts.max_derivative.unwrap_or(2 * freq.order() + 1);
    expcore::check_phi_positivity(freq, j_max, &grid)
}

/// Certifies that `(b_0(x), ..., b_N(x))` is a moment sequence on the
/// half-line (Q1, Q2 for every admissible `k`) or on `[0, 1]` (Q2, Q3).
pub fn theorem1_check(freq: &Frequencies, x: f64, region: Region, opts: &CheckOptions) -> Result<Theorem1Report> {
    if opts.exact {
        let exact_x = Rational::from_float(x).ok_or_else(|| Error::Domain(format!("x = {x} is not representable")))?;
        return theorem1_check_exact(freq, &exact_x, region, opts);
    }
    prepare(freq, x, region)?;
    let hyp = hypothesis(freq, x, opts)?;
    let basis = expcore::eval_basis(freq, x)?.values;
    let mut checks = Vec::new();
    for (k, form) in region.forms(freq.order()) {
        let m = build_hankel(&basis, k, form)?;
        let report = psd_check(&m, opts.epsilon)?;
        checks.push(FormCheck { k, form, matrix: HankelMatrix::Float(m), report });
    }
    let pass = hyp.pass && checks.iter().all(|c| c.report.is_psd);
    Ok(Theorem1Report { region, x, basis, hypothesis: hyp, checks, pass })
}

/// Exact variant: the basis is the rational truncated Taylor series at a
/// rational `x`, certified by exact minors and LDLᵀ.
pub fn theorem1_check_exact(
    freq: &Frequencies,
    x: &Rational,
    region: Region,
    opts: &CheckOptions,
) -> Result<Theorem1Report> {
    let xf = numerics::to_f64(x);
    prepare(freq, xf, region)?;
    let hyp = hypothesis(freq, xf, opts)?;
    let basis = expcore::eval_basis_exact(freq, x)?.values;
    let mut checks = Vec::new();
    for (k, form) in region.forms(freq.order()) {
        let m = build_hankel_exact(&basis, k, form)?;
        let report = psd_check_exact(&m)?;
        checks.push(FormCheck { k, form, matrix: HankelMatrix::Exact(m), report });
    }
    let pass = hyp.pass && checks.iter().all(|c| c.report.is_psd);
    Ok(Theorem1Report {
        region,
        x: xf,
        basis: basis.iter().map(numerics::to_f64).collect(),
        hypothesis: hyp,
        checks,
        pass,
    })
}

/// Determinant of an exact Hankel form; convenience for reports.
pub fn hankel_det(m: &RationalMatrix) -> Rational {
    exact_det(m)
}
