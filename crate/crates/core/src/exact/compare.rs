use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::enclosure::log_fx;
use super::ExactPosReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOutcome {
    Less,
    Equal,
    Greater,
    UndecidedAtPrecision(u64),
}

impl CompareOutcome {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            CompareOutcome::Less => Some(Ordering::Less),
            CompareOutcome::Equal => Some(Ordering::Equal),
            CompareOutcome::Greater => Some(Ordering::Greater),
            CompareOutcome::UndecidedAtPrecision(_) => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            CompareOutcome::Less => CompareOutcome::Greater,
            CompareOutcome::Greater => CompareOutcome::Less,
            o => o,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start_bits: u64,
    pub max_bits: u64,
    /// Largest integer (in bits) built by the exact route.
    pub integer_cap_bits: u64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            start_bits: 128,
            max_bits: 4096,
            integer_cap_bits: 1_000_000,
        }
    }
}

/// How a comparison was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    Numeric(u64),
}

pub fn compare(a: &ExactPosReal, b: &ExactPosReal, policy: &PrecisionPolicy) -> CompareOutcome {
    compare_with_method(a, b, policy).0
}

pub fn compare_with_method(
    a: &ExactPosReal,
    b: &ExactPosReal,
    policy: &PrecisionPolicy,
) -> (CompareOutcome, Method) {
    let d = a / b;
    if d.is_one() {
        return (CompareOutcome::Equal, Method::Exact);
    }
    if d.e_coeff().is_zero() {
        if let Some(o) = exact_sign(&d, policy.integer_cap_bits) {
            return (o, Method::Exact);
        }
    }
    numeric_sign(&d, policy)
}

/// Sign of `log d` when `d` is a product of rational prime powers, by comparing
/// `prod p^(L c_p)` over positive and negative exponents.
fn exact_sign(d: &ExactPosReal, cap_bits: u64) -> Option<CompareOutcome> {
    let l = d
        .prime_logs()
        .values()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut size: f64 = 0.0;
    let mut exps = Vec::new();
    for (p, r) in d.prime_logs() {
        let k = (r * &l).to_integer();
        size += k.abs().to_string().parse::<f64>().unwrap_or(f64::INFINITY) * p.bits() as f64;
        exps.push((p, k));
    }
    if size > cap_bits as f64 {
        return None;
    }
    let mut pos = BigUint::one();
    let mut neg = BigUint::one();
    for (p, k) in exps {
        let e: u32 = k.magnitude().try_into().ok()?;
        let pk = p.pow(e);
        if k.is_positive() {
            pos *= pk;
        } else {
            neg *= pk;
        }
    }
    Some(match pos.cmp(&neg) {
        Ordering::Less => CompareOutcome::Less,
        Ordering::Equal => CompareOutcome::Equal,
        Ordering::Greater => CompareOutcome::Greater,
    })
}

fn numeric_sign(d: &ExactPosReal, policy: &PrecisionPolicy) -> (CompareOutcome, Method) {
    let mut w = policy.start_bits.max(16);
    loop {
        let fx = log_fx(d, w);
        if fx.lo.is_positive() {
            return (CompareOutcome::Greater, Method::Numeric(w));
        }
        if fx.hi.is_negative() {
            return (CompareOutcome::Less, Method::Numeric(w));
        }
        if w >= policy.max_bits {
            return (CompareOutcome::UndecidedAtPrecision(w), Method::Numeric(w));
        }
        w = (w * 2).min(policy.max_bits);
    }
}
