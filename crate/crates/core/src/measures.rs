//! Nonnegative measures on `[0, ∞)` and their moment sequences.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::expcore::{self, Frequencies};
use crate::numerics::{self, Rational};
use crate::quadrature::Integrator;
use crate::{Error, Result};

/// Relative accuracy requested from the adaptive quadrature.
pub const QUADRATURE_RTOL: f64 = 1e-11;
/// Atoms closer than this (relative to `max(1, |x|)`) are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Halfline,
    Interval { a: f64, b: f64 },
}

impl Domain {
    pub fn unit() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
            return Err(Error::Domain(format!("interval [{a}, {b}] must satisfy 0 <= a < b")));
        }
        Ok(Domain::Interval { a, b })
    }

    /// Accepts `halfline`, `unit-interval`, `interval:a,b` and `[a,b]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "halfline" | "half-line" => return Ok(Domain::Halfline),
            "unit-interval" | "unit_interval" | "unit" => return Ok(Domain::unit()),
            _ => {}
        }
        let body = t
            .strip_prefix("interval:")
            .or_else(|| t.strip_prefix('[').and_then(|r| r.strip_suffix(']')))
            .ok_or_else(|| Error::Parse(format!("unknown domain {t:?}")))?;
        let (a, b) =
            body.split_once(',').ok_or_else(|| Error::Parse(format!("interval needs two endpoints: {t:?}")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad endpoint {s:?}")));
        Domain::interval(parse(a)?, parse(b)?)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        match *self {
            Domain::Halfline => x >= -tol,
            Domain::Interval { a, b } => x >= a - tol && x <= b + tol,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Domain::Halfline => "halfline".into(),
            Domain::Interval { a, b } => format!("interval[{a},{b}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// Finitely many weighted points, sorted by position with near-duplicates
/// merged and zero weights dropped.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomsJson")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct AtomsJson {
    atoms: Vec<Atom>,
}

impl TryFrom<AtomsJson> for AtomicMeasure {
    type Error = Error;
    fn try_from(raw: AtomsJson) -> Result<Self> {
        AtomicMeasure::new(raw.atoms)
    }
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if let Some(bad) = atoms.iter().find(|a| !a.x.is_finite() || !a.w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite atom {bad:?}")));
        }
        if let Some(bad) = atoms.iter().find(|a| a.w < 0.0) {
            return Err(Error::InvalidMeasure(format!("negative weight {} at {}", bad.w, bad.x)));
        }
        let mut sorted: Vec<Atom> = atoms.into_iter().filter(|a| a.w > 0.0).collect();
        sorted.sort_by(|p, q| p.x.total_cmp(&q.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(sorted.len());
        for atom in sorted {
            match merged.last_mut() {
                Some(last) if (atom.x - last.x).abs() <= MERGE_TOLERANCE * atom.x.abs().max(1.0) => {
                    let w = last.w + atom.w;
                    last.x = (last.x * last.w + atom.x * atom.w) / w;
                    last.w = w;
                }
                _ => merged.push(atom),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(x, w)| Atom { x, w }).collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn dirac(x: f64) -> Self {
        Self { atoms: vec![Atom { x, w: 1.0 }] }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// `α·self + β·other` for `α, β ≥ 0`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        let first = self.atoms.iter().map(|a| Atom { x: a.x, w: alpha * a.w });
        let second = other.atoms.iter().map(|a| Atom { x: a.x, w: beta * a.w });
        Self::new(first.chain(second).collect())
    }

    /// `∫ t^j dμ` for `j = 0..=top`.
    pub fn power_sums(&self, top: usize) -> Vec<f64> {
        (0..=top).map(|j| self.atoms.iter().map(|a| a.w * a.x.powi(j as i32)).sum()).collect()
    }
}

/// A measure accepted as moment-computation input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "MeasureJson")]
pub enum Measure {
    Atomic(AtomicMeasure),
    /// Normalized uniform density on `[a, b]`.
    Uniform {
        a: f64,
        b: f64,
    },
    /// Density `rate · e^{−rate t}` on `[0, truncate]` (or `[0, ∞)`), not
    /// renormalized after truncation.
    Exponential {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<f64>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MeasureJson {
    Atomic(AtomicMeasure),
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        rate: f64,
        #[serde(default)]
        truncate: Option<f64>,
    },
}

impl TryFrom<MeasureJson> for Measure {
    type Error = Error;
    fn try_from(raw: MeasureJson) -> Result<Self> {
        let m = match raw {
            MeasureJson::Atomic(a) => Measure::Atomic(a),
            MeasureJson::Uniform { a, b } => Measure::Uniform { a, b },
            MeasureJson::Exponential { rate, truncate } => Measure::Exponential { rate, truncate },
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<AtomicMeasure> for Measure {
    fn from(a: AtomicMeasure) -> Self {
        Measure::Atomic(a)
    }
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Measure::Atomic(ref atoms) => {
                if let Some(a) = atoms.atoms().iter().find(|a| a.x < 0.0) {
                    return Err(Error::InvalidMeasure(format!("atom at {} lies left of 0", a.x)));
                }
            }
            Measure::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
                    return Err(Error::InvalidMeasure(format!("uniform support [{a}, {b}] must satisfy 0 <= a < b")));
                }
            }
            Measure::Exponential { rate, truncate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::InvalidMeasure(format!("exponential rate {rate} must be positive")));
                }
                if let Some(t) = truncate {
                    if !(t.is_finite() && t > 0.0) {
                        return Err(Error::InvalidMeasure(format!("truncation point {t} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest support point (`∞` for an untruncated tail).
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Measure::Atomic(ref m) => Some((m.atoms.first()?.x, m.atoms.last()?.x)),
            Measure::Uniform { a, b } => Some((a, b)),
            Measure::Exponential { truncate, .. } => Some((0.0, truncate.unwrap_or(f64::INFINITY))),
        }
    }

    pub fn supported_in(&self, domain: &Domain) -> bool {
        match self.support() {
            None => true,
            Some((lo, hi)) => domain.contains(lo, 0.0) && domain.contains(hi, 0.0),
        }
    }
}

/// Moments `c_0..c_N` (`N` odd) with the domain they are posed on.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub domain: Domain,
    values: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>, domain: Domain) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(Error::IndexRange(format!(
                "a moment sequence needs an even number of entries (N odd), got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("moments must be finite".into()));
        }
        Ok(Self { domain, values, exact: None })
    }

    pub fn from_exact(values: Vec<Rational>, domain: Domain) -> Result<Self> {
        let mut seq = Self::new(values.iter().map(numerics::to_f64).collect(), domain)?;
        seq.exact = Some(values);
        Ok(seq)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    /// `N`, the highest moment index.
    pub fn top(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(v) => v.iter().all(Zero::is_zero),
            None => self.values.iter().all(|&v| v == 0.0),
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MomentValue {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct MomentSequenceJson {
    domain: Domain,
    values: Vec<MomentValue>,
}

impl Serialize for MomentSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let values = match &self.exact {
            Some(v) => v.iter().map(|r| MomentValue::Text(r.to_string())).collect(),
            None => self.values.iter().map(|&v| MomentValue::Number(v)).collect(),
        };
        MomentSequenceJson { domain: self.domain, values }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MomentSequenceJson::deserialize(d)?;
        let built = if raw.values.iter().all(|v| matches!(v, MomentValue::Text(_))) && !raw.values.is_empty() {
            raw.values
                .iter()
                .map(|v| match v {
                    MomentValue::Text(t) => numerics::parse_rational(t),
                    MomentValue::Number(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|v| MomentSequence::from_exact(v, raw.domain))
        } else {
            raw.values
                .iter()
                .map(|v| match v {
                    MomentValue::Number(x) => Ok(*x),
                    MomentValue::Text(t) => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad moment {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|v| MomentSequence::new(v, raw.domain))
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// `b_j(x) e^{−rate·x}` without overflowing at large `x`.
fn damped_basis(freq: &Frequencies, x: f64, rate: f64) -> Result<Vec<f64>> {
    let n = freq.order();
    let damping = (-rate * x).exp();
    if freq.max_abs() * x <= 700.0 {
        let b = expcore::eval_basis(freq, x)?;
        return Ok(b.values.into_iter().map(|v| v * damping).collect());
    }
    // far tail: the dominant exponential makes the closed form well conditioned
    let mut out = Vec::with_capacity(n + 1);
    let mut j_fact = 1.0;
    for j in 0..=n {
        if j > 0 {
            j_fact *= j as f64;
        }
        let order = (n - j) as i32;
        let v: f64 =
            freq.values().iter().zip(freq.weights()).map(|(&l, &w)| w * l.powi(order) * ((l - rate) * x).exp()).sum();
        out.push(j_fact * v);
    }
    Ok(out)
}

/// `ĉ_j = ∫ b_j dμ`, `j = 0..=N`, tagged with the half-line domain.
pub fn exp_moments(freq: &Frequencies, mu: &Measure) -> Result<MomentSequence> {
    mu.validate()?;
    let dim = freq.order() + 1;
    let values = match *mu {
        Measure::Atomic(ref atoms) => {
            let mut acc = vec![0.0; dim];
            for atom in atoms.atoms() {
                let b = expcore::eval_basis(freq, atom.x)?;
                for (slot, v) in acc.iter_mut().zip(b.values) {
                    *slot += atom.w * v;
                }
            }
            acc
        }
        Measure::Uniform { a, b } => {
            let density = 1.0 / (b - a);
            Integrator::new(QUADRATURE_RTOL).integrate(
                |x| Ok(expcore::eval_basis(freq, x)?.values.into_iter().map(|v| v * density).collect()),
                a,
                b,
                dim,
            )?
        }
        Measure::Exponential { rate, truncate } => {
            let integ = Integrator::new(QUADRATURE_RTOL);
            match truncate {
                Some(t) => integ.integrate(
                    |x| Ok(damped_basis(freq, x, rate)?.into_iter().map(|v| v * rate).collect()),
                    0.0,
                    t,
                    dim,
                )?,
                None => {
                    let top = freq.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    if top >= rate {
                        return Err(Error::InvalidMeasure(format!(
                            "exponential moments diverge: largest frequency {top} >= rate {rate}"
                        )));
                    }
                    // x = u / (1 − u) maps [0, 1) onto [0, ∞)
                    integ.integrate(
                        |u| {
                            let x = u / (1.0 - u);
                            let jac = 1.0 / ((1.0 - u) * (1.0 - u));
                            Ok(damped_basis(freq, x, rate)?
                                .into_iter()
                                .map(|v| if v == 0.0 { 0.0 } else { v * rate * jac })
                                .collect())
                        },
                        0.0,
                        1.0,
                        dim,
                    )?
                }
            }
        }
    };
    MomentSequence::new(values, Domain::Halfline)
}

/// `c_j = ∫ t^j dμ`, `j = 0..=top`; `top` must be odd.
pub fn power_moments(mu: &Measure, top: usize) -> Result<MomentSequence> {
    mu.validate()?;
    let values = match *mu {
        Measure::Atomic(ref atoms) => atoms.power_sums(top),
        Measure::Uniform { a, b } => (0..=top)
            .map(|j| {
                let k = j as i32 + 1;
                (b.powi(k) - a.powi(k)) / (k as f64 * (b - a))
            })
            .collect(),
        Measure::Exponential { rate, truncate: None } => {
            let mut out = Vec::with_capacity(top + 1);
            let mut v = 1.0;
            for j in 0..=top {
                if j > 0 {
                    v *= j as f64 / rate;
                }
                out.push(v);
            }
            out
        }
        Measure::Exponential { rate, truncate: Some(t) } => Integrator::new(QUADRATURE_RTOL).integrate(
            |x| {
                let d = rate * (-rate * x).exp();
                Ok((0..=top).map(|j| d * x.powi(j as i32)).collect())
            },
            0.0,
            t,
            top + 1,
        )?,
    };
    MomentSequence::new(values, Domain::Halfline)
}

/// Exact power moments of rational `(position, weight)` atoms.
pub fn power_moments_exact(atoms: &[(Rational, Rational)], top: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); top + 1];
    for (x, w) in atoms {
        let mut p = Rational::one();
        for slot in out.iter_mut() {
            *slot += w * &p;
            p *= x;
        }
    }
    out
}

/// Exact exponential moments `Σ w_i b_j(x_i)` via the truncated Taylor
/// series of `Φ`, for rational frequencies and atoms.
pub fn exp_moments_exact(freq: &Frequencies, atoms: &[(Rational, Rational)]) -> Result<Vec<Rational>> {
    let mut out = vec![Rational::zero(); freq.order() + 1];
    for (x, w) in atoms {
        let b = expcore::eval_basis_exact(freq, x)?;
        for (slot, v) in out.iter_mut().zip(b.values) {
            *slot += w * v;
        }
    }
    Ok(out)
}
