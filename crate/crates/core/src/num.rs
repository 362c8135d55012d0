//! Exact numbers: rationals and extended non-negative values.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal `{0}`")]
pub struct NumParseError(pub String);

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-2.5"`, `"7/3"`.
pub fn parse_rat(s: &str) -> Result<Rat, NumParseError> {
    let err = || NumParseError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rat::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Canonical text: a terminating decimal when one exists, `p/q` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let k = twos.max(fives);
    let scaled = (r.abs() * Rat::from_integer(num_traits::pow(BigInt::from(10), k))).to_integer();
    let s = scaled.to_string();
    let s = format!("{:0>width$}", s, width = k + 1);
    let (ip, fp) = s.split_at(s.len() - k);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

/// A non-negative rational or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtNonNeg {
    Fin(Rat),
    Inf,
}

impl ExtNonNeg {
    pub fn zero() -> Self {
        ExtNonNeg::Fin(Rat::zero())
    }

    pub fn int(n: i64) -> Self {
        assert!(n >= 0);
        ExtNonNeg::Fin(rat(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        assert!(!r.is_negative(), "negative value {r}");
        ExtNonNeg::Fin(r)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNonNeg::Fin(r) if r.is_zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtNonNeg::Inf)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtNonNeg::Fin(r) => Some(r),
            ExtNonNeg::Inf => None,
        }
    }

    pub fn add(&self, other: &ExtNonNeg) -> ExtNonNeg {
        match (self, other) {
            (ExtNonNeg::Fin(a), ExtNonNeg::Fin(b)) => ExtNonNeg::Fin(a + b),
            _ => ExtNonNeg::Inf,
        }
    }

    /// Multiplication by a non-negative rational; `0 · ∞ = 0`.
    pub fn scale(&self, c: &Rat) -> ExtNonNeg {
        match self {
            ExtNonNeg::Fin(a) => ExtNonNeg::Fin(a * c),
            ExtNonNeg::Inf if c.is_zero() => ExtNonNeg::zero(),
            ExtNonNeg::Inf => ExtNonNeg::Inf,
        }
    }

    /// Division by a positive rational.
    pub fn div(&self, c: &Rat) -> ExtNonNeg {
        assert!(c.is_positive());
        match self {
            ExtNonNeg::Fin(a) => ExtNonNeg::Fin(a / c),
            ExtNonNeg::Inf => ExtNonNeg::Inf,
        }
    }

    /// `self - other`, clamped into a signed extended value.
    pub fn minus(&self, other: &ExtNonNeg) -> ExtSigned {
        match (self, other) {
            (ExtNonNeg::Fin(a), ExtNonNeg::Fin(b)) => ExtSigned::Fin(a - b),
            (ExtNonNeg::Inf, ExtNonNeg::Inf) => ExtSigned::Undefined,
            (ExtNonNeg::Inf, _) => ExtSigned::PosInf,
            (_, ExtNonNeg::Inf) => ExtSigned::NegInf,
        }
    }
}

impl PartialOrd for ExtNonNeg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNonNeg {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNonNeg::Fin(a), ExtNonNeg::Fin(b)) => a.cmp(b),
            (ExtNonNeg::Fin(_), ExtNonNeg::Inf) => Ordering::Less,
            (ExtNonNeg::Inf, ExtNonNeg::Fin(_)) => Ordering::Greater,
            (ExtNonNeg::Inf, ExtNonNeg::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtNonNeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonNeg::Fin(r) => f.write_str(&format_rat(r)),
            ExtNonNeg::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtNonNeg {
    type Err = NumParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(ExtNonNeg::Inf);
        }
        let r = parse_rat(t)?;
        if r.is_negative() {
            return Err(NumParseError(s.to_string()));
        }
        Ok(ExtNonNeg::Fin(r))
    }
}

impl From<Rat> for ExtNonNeg {
    fn from(r: Rat) -> Self {
        ExtNonNeg::from_rat(r)
    }
}

/// Difference of two extended values. `Undefined` stands for `∞ - ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtSigned {
    NegInf,
    Fin(Rat),
    PosInf,
    Undefined,
}

impl fmt::Display for ExtSigned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtSigned::NegInf => f.write_str("-inf"),
            ExtSigned::Fin(r) => f.write_str(&format_rat(r)),
            ExtSigned::PosInf => f.write_str("inf"),
            ExtSigned::Undefined => f.write_str("undefined"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parse() {
        assert_eq!(parse_rat("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_rat("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rat("7/3").unwrap(), ratio(7, 3));
        assert_eq!(parse_rat(".5").unwrap(), ratio(1, 2));
        assert!(parse_rat("1e3").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn decimal_format() {
        assert_eq!(format_rat(&ratio(5, 2)), "2.5");
        assert_eq!(format_rat(&ratio(1, 8)), "0.125");
        assert_eq!(format_rat(&ratio(-3, 20)), "-0.15");
        assert_eq!(format_rat(&ratio(1, 3)), "1/3");
        assert_eq!(format_rat(&rat(12)), "12");
    }

    #[test]
    fn ext_order_and_arith() {
        let one = ExtNonNeg::int(1);
        assert!(one < ExtNonNeg::Inf);
        assert_eq!(one.add(&ExtNonNeg::Inf), ExtNonNeg::Inf);
        assert_eq!(ExtNonNeg::Inf.scale(&rat(0)), ExtNonNeg::zero());
        assert_eq!("inf".parse::<ExtNonNeg>().unwrap(), ExtNonNeg::Inf);
        assert!("-1".parse::<ExtNonNeg>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn format_parse_roundtrip(n in -100000i64..100000, d in 1i64..2000) {
            let r = ratio(n, d);
            proptest::prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }
}
