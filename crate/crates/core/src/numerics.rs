//! Exact rational kernels: factorials, rising factorials, complete homogeneous
//! symmetric polynomials and fraction-free determinants.
//!
//! Every exact quantity in the crate is a [`Rational`], i.e. a reduced
//! `BigInt / BigInt` with positive denominator. `num-rational` keeps the
//! canonical form after every operation, so structural equality is value
//! equality.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.125"` or
/// `"2.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::ZeroDivision(format!("rational {s:?} has zero denominator")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a rational number: {s:?}")));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().unwrap_or_default());
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if shift >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if negative { -value } else { value })
}

pub fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

/// Rising factorial `x (x+1) ... (x+m-1)`, with the empty product for `m = 0`.
pub fn pochhammer(x: &Rational, m: u32) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..m {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// All complete homogeneous symmetric polynomials `h_0..=h_max_degree` of
/// `values`, built one variable at a time:
/// `h_m(v ∪ {t}) = h_m(v) + t · h_{m-1}(v ∪ {t})`.
pub fn complete_homogeneous_table<T>(values: &[T], max_degree: usize) -> Vec<T>
where
    T: Clone + Zero + One + for<'a> Add<&'a T, Output = T> + for<'a> Mul<&'a T, Output = T>,
{
    let mut table = vec![T::zero(); max_degree + 1];
    table[0] = T::one();
    if values.is_empty() {
        return table;
    }
    let mut first = T::one();
    for slot in table.iter_mut() {
        *slot = first.clone();
        first = first * &values[0];
    }
    for t in &values[1..] {
        for m in 1..=max_degree {
            let carried = table[m - 1].clone() * t;
            table[m] = table[m].clone() + &carried;
        }
    }
    table
}

pub fn complete_homogeneous(m: usize, values: &[Rational]) -> Rational {
    complete_homogeneous_table(values, m).pop().unwrap_or_else(Rational::one)
}

/// Dense square matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    order: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(order: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::Dimension { expected: order * order, found: entries.len() });
        }
        Ok(Self { order, entries })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        Self { order, entries }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let order = rows.len();
        let entries: Vec<Rational> = rows.into_iter().flatten().collect();
        Self::new(order, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.order + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.order.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Top-left `size × size` block.
    pub fn leading(&self, size: usize) -> Self {
        Self::from_fn(size, |i, j| self.get(i, j).clone())
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.order, self.order, |i, j| to_f64(self.get(i, j)))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Exact determinant. Each row is scaled to integers by the lcm of its
/// denominators, then Bareiss elimination runs over `BigInt`.
pub fn exact_det(m: &RationalMatrix) -> Rational {
    let n = m.order();
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = &m.entries[i * n..(i + 1) * n];
        let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        a.push(row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect());
        scale *= lcm;
    }

    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = Rational::new(a[n - 1][n - 1].clone(), scale);
    if negate {
        -det
    } else {
        det
    }
}

/// Determinants of the nested top-left blocks, orders `1..=n`.
pub fn leading_principal_minors(m: &RationalMatrix) -> Result<Vec<Rational>> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok((1..=m.order()).map(|k| exact_det(&m.leading(k))).collect())
}

/// Outcome of the exact symmetric-pivoted LDLᵀ factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct LdlOutcome {
    pub is_psd: bool,
    pub rank: usize,
    pub pivots: Vec<Rational>,
    /// Diagonal index (original numbering) where the factorization found a
    /// negative pivot or a nonzero row behind a zero pivot.
    pub obstruction: Option<usize>,
}

/// Decides positive semidefiniteness exactly. At every step the largest
/// remaining diagonal entry is used as pivot; a negative diagonal entry, or a
/// zero diagonal with a nonzero off-diagonal in its row, certifies
/// indefiniteness.
pub fn ldl_psd(m: &RationalMatrix) -> Result<LdlOutcome> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.order();
    let mut a: Vec<Vec<Rational>> = m.rows();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();

    while !remaining.is_empty() {
        if let Some(&neg) = remaining.iter().find(|&&i| a[i][i].is_negative()) {
            return Ok(LdlOutcome { is_psd: false, rank: pivots.len(), pivots, obstruction: Some(neg) });
        }
        let p = *remaining.iter().max_by(|&&i, &&j| a[i][i].cmp(&a[j][j])).expect("nonempty");
        if a[p][p].is_zero() {
            // every remaining diagonal entry is zero; PSD forces the block to vanish
            let offender = remaining.iter().find(|&&i| remaining.iter().any(|&j| !a[i][j].is_zero()));
            return Ok(LdlOutcome {
                is_psd: offender.is_none(),
                rank: pivots.len(),
                pivots,
                obstruction: offender.copied(),
            });
        }
        remaining.retain(|&i| i != p);
        let pivot = a[p][p].clone();
        for &i in &remaining {
            if a[i][p].is_zero() {
                continue;
            }
            let factor = &a[i][p] / &pivot;
            for &j in &remaining {
                let update = &factor * &a[p][j];
                a[i][j] -= update;
            }
        }
        pivots.push(pivot);
    }
    Ok(LdlOutcome { is_psd: true, rank: pivots.len(), pivots, obstruction: None })
}

/// `n choose k` as a rational, used by the affine moment transforms.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Serde helpers writing rationals as `"p/q"` strings (`"p"` when `q = 1`).
pub mod serde_rational {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&v.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts.iter().map(|t| parse_rational(t).map_err(serde::de::Error::custom)).collect()
        }
    }
}
