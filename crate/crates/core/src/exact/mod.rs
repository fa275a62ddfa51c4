//! Positive reals of the form `exp(e0) * prod p_i^{r_i}` with rational exponents.
//!
//! Heights, minima and exponentiated slopes all live in this multiplicative
//! group. Values are stored additively (as their logarithm's coordinates in
//! the basis `1, log 2, log 3, log 5, ...`), so equality is syntactic and
//! multiplication is exact.

mod compare;
mod enclosure;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use compare::{compare, compare_with_method, CompareOutcome, Method, PrecisionPolicy};
pub use enclosure::{log_enclosure, to_float, Dyadic, Enclosure};

use crate::error::{Error, Result};
use crate::primes::factorize;
use crate::rational::{fmt_rat, int, parse_rat, Rat};

/// A base in a raw product: either the symbol `e` or a positive rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    E,
    Rational(Rat),
}

impl Base {
    pub fn int(n: i64) -> Self {
        Base::Rational(int(n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactPosReal {
    e: Rat,
    logs: BTreeMap<BigUint, Rat>,
}

impl ExactPosReal {
    pub fn one() -> Self {
        Self::default()
    }

    /// `e^r`.
    pub fn exp(r: Rat) -> Self {
        Self {
            e: r,
            logs: BTreeMap::new(),
        }
    }

    /// `p^r` for a prime `p` (not checked).
    pub fn prime_pow(p: BigUint, r: Rat) -> Self {
        let mut logs = BTreeMap::new();
        if !r.is_zero() {
            logs.insert(p, r);
        }
        Self {
            e: Rat::zero(),
            logs,
        }
    }

    pub fn from_rational(r: &Rat) -> Result<Self> {
        Self::rational_pow(r, &Rat::one())
    }

    pub fn from_int(n: u64) -> Self {
        Self::from_rational(&int(n as i64)).expect("positive integer")
    }

    pub fn from_biguint(n: &BigUint) -> Result<Self> {
        Self::from_rational(&Rat::from_integer(BigInt::from_biguint(Sign::Plus, n.clone())))
    }

    /// `r^k` for a positive rational `r` and rational `k`.
    pub fn rational_pow(r: &Rat, k: &Rat) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveBase(fmt_rat(r)));
        }
        let mut out = Self::one();
        if k.is_zero() {
            return Ok(out);
        }
        for (p, e) in factorize(r.numer().magnitude())? {
            out.add_log(p, k * Rat::from_integer(BigInt::from(e)));
        }
        for (p, e) in factorize(r.denom().magnitude())? {
            out.add_log(p, -(k * Rat::from_integer(BigInt::from(e))));
        }
        Ok(out)
    }

    /// Square root of a positive rational.
    pub fn sqrt_rational(r: &Rat) -> Result<Self> {
        Self::rational_pow(r, &Rat::new(1.into(), 2.into()))
    }

    fn add_log(&mut self, p: BigUint, r: Rat) {
        if r.is_zero() {
            return;
        }
        let entry = self.logs.entry(p.clone()).or_insert_with(Rat::zero);
        *entry += r;
        if entry.is_zero() {
            self.logs.remove(&p);
        }
    }

    pub fn e_coeff(&self) -> &Rat {
        &self.e
    }

    pub fn prime_logs(&self) -> &BTreeMap<BigUint, Rat> {
        &self.logs
    }

    pub fn is_one(&self) -> bool {
        self.e.is_zero() && self.logs.is_empty()
    }

    pub fn pow(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::one();
        }
        Self {
            e: &self.e * r,
            logs: self.logs.iter().map(|(p, x)| (p.clone(), x * r)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(&-Rat::one())
    }

    pub fn sqrt(&self) -> Self {
        self.pow(&Rat::new(1.into(), 2.into()))
    }

    /// The exact rational value, if there is one (no `e` part, integral exponents).
    pub fn as_rational(&self) -> Option<Rat> {
        if !self.e.is_zero() || self.logs.values().any(|r| !r.is_integer()) {
            return None;
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, r) in &self.logs {
            let k = r.to_integer();
            let pk = num_traits::pow(
                BigInt::from_biguint(Sign::Plus, p.clone()),
                k.magnitude().try_into().ok()?,
            );
            if k.is_positive() {
                num *= pk;
            } else {
                den *= pk;
            }
        }
        Some(Rat::new(num, den))
    }

    /// Natural logarithm in double precision (no rigour; for estimates and display).
    pub fn ln_f64(&self) -> f64 {
        let mut acc = crate::rational::to_f64(&self.e);
        for (p, r) in &self.logs {
            acc += crate::rational::to_f64(r) * ln_biguint_f64(p);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.ln_f64().exp()
    }
}

pub(crate) fn ln_biguint_f64(p: &BigUint) -> f64 {
    let bits = p.bits();
    if bits <= 1000 {
        num_traits::ToPrimitive::to_f64(p).unwrap().ln()
    } else {
        let shift = bits - 64;
        num_traits::ToPrimitive::to_f64(&(p >> shift)).unwrap().ln()
            + shift as f64 * std::f64::consts::LN_2
    }
}

/// Builds a normalized value from a raw list of `(base, exponent)` pairs.
pub fn normalize(raw: &[(Base, Rat)]) -> Result<ExactPosReal> {
    let mut out = ExactPosReal::one();
    for (base, k) in raw {
        match base {
            Base::E => out.e += k,
            Base::Rational(r) => out = &out * &ExactPosReal::rational_pow(r, k)?,
        }
    }
    Ok(out)
}

impl Mul for &ExactPosReal {
    type Output = ExactPosReal;
    fn mul(self, rhs: &ExactPosReal) -> ExactPosReal {
        let mut out = self.clone();
        out.e += &rhs.e;
        for (p, r) in &rhs.logs {
            out.add_log(p.clone(), r.clone());
        }
        out
    }
}

impl Mul for ExactPosReal {
    type Output = ExactPosReal;
    fn mul(self, rhs: ExactPosReal) -> ExactPosReal {
        &self * &rhs
    }
}

impl Div for &ExactPosReal {
    type Output = ExactPosReal;
    fn div(self, rhs: &ExactPosReal) -> ExactPosReal {
        self * &rhs.inv()
    }
}

impl Div for ExactPosReal {
    type Output = ExactPosReal;
    fn div(self, rhs: ExactPosReal) -> ExactPosReal {
        &self / &rhs
    }
}

impl std::iter::Product for ExactPosReal {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| &a * &b)
    }
}

impl fmt::Display for ExactPosReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.e.is_zero() {
            parts.push(format!("e^({})", fmt_rat(&self.e)));
        }
        for (p, r) in &self.logs {
            if r.is_one() {
                parts.push(p.to_string());
            } else {
                parts.push(format!("{p}^({})", fmt_rat(r)));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    #[serde(default = "zero_str")]
    e: String,
    #[serde(default)]
    logs: BTreeMap<String, String>,
}

fn zero_str() -> String {
    "0".into()
}

impl Serialize for ExactPosReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Keys sorted numerically; BTreeMap<String, _> would sort "11" before "2".
        use serde::ser::SerializeMap;
        struct Logs<'a>(&'a BTreeMap<BigUint, Rat>);
        impl Serialize for Logs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (p, r) in self.0 {
                    m.serialize_entry(&p.to_string(), &fmt_rat(r))?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("e", &fmt_rat(&self.e))?;
        m.serialize_entry("logs", &Logs(&self.logs))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for ExactPosReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        let mut out = ExactPosReal::exp(parse_rat(&w.e).map_err(D::Error::custom)?);
        for (p, r) in w.logs {
            let p: BigUint = p
                .parse()
                .map_err(|_| D::Error::custom(format!("bad prime key {p:?}")))?;
            if !crate::primes::is_prime(&p) {
                return Err(D::Error::custom(format!("log key {p} is not prime")));
            }
            out.add_log(p, parse_rat(&r).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn logs(v: &ExactPosReal) -> Vec<(u64, Rat)> {
        v.prime_logs()
            .iter()
            .map(|(p, r)| (num_traits::ToPrimitive::to_u64(p).unwrap(), r.clone()))
            .collect()
    }

    #[test]
    fn normalize_examples() {
        let cube_root_8 = normalize(&[(Base::int(8), rat(1, 3))]).unwrap();
        assert_eq!(logs(&cube_root_8), vec![(2, int(1))]);
        assert_eq!(cube_root_8.as_rational(), Some(int(2)));

        let v = normalize(&[(Base::int(2), rat(1, 2)), (Base::int(5), rat(1, 4))]).unwrap();
        assert_eq!(logs(&v), vec![(2, rat(1, 2)), (5, rat(1, 4))]);

        // (n+1)^(-1/(2n)) with n = 3
        let v = normalize(&[(Base::int(4), rat(-1, 6))]).unwrap();
        assert_eq!(logs(&v), vec![(2, rat(-1, 3))]);

        assert!(normalize(&[(Base::int(-2), rat(1, 2))]).is_err());
        assert!(normalize(&[(Base::int(0), rat(1, 2))]).is_err());
    }

    #[test]
    fn normalize_drops_zero_exponents() {
        let v = normalize(&[(Base::int(6), int(1)), (Base::Rational(rat(1, 3)), int(1))]).unwrap();
        assert_eq!(logs(&v), vec![(2, int(1))]);
        let one = normalize(&[(Base::int(7), int(2)), (Base::int(49), int(-1))]).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn arithmetic_examples() {
        let five_q = ExactPosReal::prime_pow(5u32.into(), rat(1, 4));
        assert_eq!(&five_q * &five_q, ExactPosReal::prime_pow(5u32.into(), rat(1, 2)));

        let sqrt2 = ExactPosReal::from_int(2).pow(&rat(1, 2));
        assert_eq!(logs(&sqrt2), vec![(2, rat(1, 2))]);

        let lhs = &sqrt2 * &five_q;
        let q = &lhs / &five_q.pow(&int(2));
        assert_eq!(logs(&q), vec![(2, rat(1, 2)), (5, rat(-1, 4))]);
    }

    #[test]
    fn serialization_shape() {
        let v = normalize(&[(Base::int(2), rat(1, 2)), (Base::int(5), rat(1, 4))]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"e":"0","logs":{"2":"1/2","5":"1/4"}}"#);
        let back: ExactPosReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        // numeric key order, not lexicographic
        let v = normalize(&[(Base::int(11), int(1)), (Base::int(2), int(1))]).unwrap();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"e":"0","logs":{"2":"1","11":"1"}}"#
        );
        // "e" may be omitted on input
        let v: ExactPosReal = serde_json::from_str(r#"{"logs":{"5":"-1/8"}}"#).unwrap();
        assert_eq!(logs(&v), vec![(5, rat(-1, 8))]);
        assert!(serde_json::from_str::<ExactPosReal>(r#"{"logs":{"4":"1"}}"#).is_err());
    }
}
