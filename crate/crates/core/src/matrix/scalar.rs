//! Scalars: exact rationals for bound verification, binary64 for long runs.

use std::fmt;
use std::ops::{AddAssign, Mul, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{NumAssignRef, NumRef, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Absolute tolerance used by float-mode equality checks.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => f.write_str("rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(Error::parse("mode", format!("expected rational|float, got {other:?}"))),
        }
    }
}

/// Matrix entry type.
///
/// `Lane` is an accumulator for inner loops (seminorm enumeration, column
/// tracking): rationals are rescaled to integer numerators over a common
/// denominator so the loop never reduces fractions.
pub trait Scalar:
    NumAssignRef + NumRef + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const MODE: Mode;

    type Lane: Clone
        + fmt::Debug
        + PartialOrd
        + for<'a> AddAssign<&'a Self::Lane>
        + for<'a> SubAssign<&'a Self::Lane>
        + for<'a> Mul<&'a Self::Lane, Output = Self::Lane>;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact equality for rationals, `|a - b| <= FLOAT_TOL` for floats.
    fn near(&self, other: &Self) -> bool;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    /// Rescale `values` into lanes; returns the lanes and the unit such that
    /// `value == lane * unit`.
    fn to_lanes(values: &[Self]) -> (Vec<Self::Lane>, Self);

    fn from_lane(lane: &Self::Lane, unit: &Self) -> Self;

    fn lane_zero() -> Self::Lane;

    /// Lane equality with the same tolerance as [`Scalar::near`].
    fn lane_near(a: &Self::Lane, b: &Self::Lane) -> bool;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value, field: &str) -> Result<Self>;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;
    type Lane = f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }

    fn to_lanes(values: &[Self]) -> (Vec<f64>, f64) {
        (values.to_vec(), 1.0)
    }

    fn from_lane(lane: &f64, unit: &f64) -> Self {
        lane * unit
    }

    fn lane_zero() -> f64 {
        0.0
    }

    fn lane_near(a: &f64, b: &f64) -> bool {
        (a - b).abs() <= FLOAT_TOL
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value, field: &str) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::parse(field, "number out of range")),
            Value::String(s) => parse_rational(s)
                .map(|q| f64::from_rational(&q))
                .map_err(|_| Error::parse(field, format!("not a number: {s:?}"))),
            other => Err(Error::parse(field, format!("expected a number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;
    type Lane = BigInt;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn to_lanes(values: &[Self]) -> (Vec<BigInt>, Self) {
        let den = values.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let lanes = values.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        (lanes, Rational::new(BigInt::one(), den))
    }

    fn from_lane(lane: &BigInt, unit: &Self) -> Self {
        unit * Rational::from_integer(lane.clone())
    }

    fn lane_zero() -> BigInt {
        BigInt::zero()
    }

    fn lane_near(a: &BigInt, b: &BigInt) -> bool {
        a == b
    }

    fn to_json(&self) -> Value {
        Value::String(render_rational(self))
    }

    fn from_json(v: &Value, field: &str) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Rational::from_integer(BigInt::from(i))),
                None => Err(Error::parse(
                    field,
                    format!("non-integer JSON number {n} in rational mode; write it as \"p/q\""),
                )),
            },
            other => Err(Error::parse(field, format!("expected \"p/q\", got {other}"))),
        }
        .map_err(|e| match e {
            Error::Parse { reason, .. } => Error::parse(field, reason),
            e => e,
        })
    }
}

/// Text form used in reports and CSV: `"p/q"` for rationals, shortest
/// round-trip decimal for floats.
pub fn render<S: Scalar>(v: &S) -> String {
    match v.to_json() {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Renders a rational as `"p/q"` (always with a denominator).
pub fn render_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |why: &str| Error::parse("rational", format!("{why}: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("bad decimal"));
        }
        let negative = int.starts_with('-');
        let int: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad("bad decimal"))?,
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad("bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(int * &scale + frac_num, scale);
        return Ok(if negative { -q } else { q });
    }
    s.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| bad("not a rational"))
}
