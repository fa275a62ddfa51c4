//! Arbitrary-precision rationals and the string form used in every file format.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Canonical rational: coprime numerator/denominator, positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn from_big(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: &BigUint) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(r: &Rat, p: &BigUint) -> i64 {
    val_int(r.numer(), p) - val_int(r.denom(), p)
}

pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 gives up on very large parts; fall back to a log-scale estimate.
        let (n, d) = (r.numer().abs(), r.denom().clone());
        let shift = n.bits() as i64 - d.bits() as i64;
        let scaled = if shift >= 0 {
            Rat::new(n, d << shift as usize)
        } else {
            Rat::new(n << (-shift) as usize, d)
        };
        let v = scaled.to_f64().unwrap_or(1.0) * 2f64.powi(shift.clamp(-1100, 1100) as i32);
        if r.is_negative() {
            -v
        } else {
            v
        }
    })
}

/// Serde adapter: a rational as `"a/b"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatStr(pub Rat);

impl fmt::Display for RatStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rat(&self.0))
    }
}

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => parse_rat(&s).map(RatStr).map_err(serde::de::Error::custom),
            Raw::I(i) => Ok(RatStr(int(i))),
        }
    }
}

pub fn to_strs(v: &[Rat]) -> Vec<RatStr> {
    v.iter().cloned().map(RatStr).collect()
}

pub fn from_strs(v: Vec<RatStr>) -> Vec<Rat> {
    v.into_iter().map(|r| r.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-1/4").unwrap(), rat(-1, 4));
        assert_eq!(parse_rat("1/-4").unwrap(), rat(-1, 4));
        assert_eq!(fmt_rat(&rat(-2, 8)), "-1/4");
        assert_eq!(fmt_rat(&int(7)), "7");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn valuations() {
        let five = BigUint::from(5u32);
        assert_eq!(val_rat(&rat(50, 3), &five), 2);
        assert_eq!(val_rat(&rat(3, 125), &five), -3);
        assert_eq!(val_rat(&rat(-7, 2), &five), 0);
    }

    #[test]
    fn huge_to_f64() {
        let big = Rat::from_integer(BigInt::from(10u32).pow(400));
        let v = to_f64(&(big.clone() / (big * int(3))));
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }
}
