use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Bundle, LocalTwist};
use crate::error::{Error, Result};
use crate::exact::{compare, CompareOutcome, ExactPosReal, PrecisionPolicy};
use crate::primes::factorize;
use crate::rational::{val_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightResult {
    Exact(ExactPosReal),
    /// Cancellation between right-shift groups could not be ruled out.
    /// `lower` is `None` when no coordinate at some place has a certified valuation.
    Interval {
        lower: Option<ExactPosReal>,
        upper: ExactPosReal,
    },
}

impl HeightResult {
    pub fn upper(&self) -> &ExactPosReal {
        match self {
            HeightResult::Exact(v) => v,
            HeightResult::Interval { upper, .. } => upper,
        }
    }

    pub fn lower(&self) -> Option<&ExactPosReal> {
        match self {
            HeightResult::Exact(v) => Some(v),
            HeightResult::Interval { lower, .. } => lower.as_ref(),
        }
    }

    pub fn exact(&self) -> Option<&ExactPosReal> {
        match self {
            HeightResult::Exact(v) => Some(v),
            HeightResult::Interval { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HeightResult::Exact(_))
    }

    /// Interval endpoints, numerically ordered.
    pub fn is_consistent(&self, policy: &PrecisionPolicy) -> bool {
        match self {
            HeightResult::Exact(_) => true,
            HeightResult::Interval { lower: None, .. } => true,
            HeightResult::Interval {
                lower: Some(l),
                upper,
            } => !matches!(compare(l, upper, policy), CompareOutcome::Greater),
        }
    }
}

/// Valuation of one coordinate of `D_L M D_R x`.
#[derive(Clone, Debug, PartialEq)]
enum CoordVal {
    Zero,
    Exact(Rat),
    AtLeast(Rat),
}

fn coordinate_valuations(t: &LocalTwist, x: &[Rat]) -> Vec<CoordVal> {
    if let Some(dl) = t.folded_left() {
        let perm = t.m.monomial_permutation().expect("monomial");
        return perm
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                if x[j].is_zero() {
                    CoordVal::Zero
                } else {
                    let c = &t.m[(i, j)] * &x[j];
                    CoordVal::Exact(&dl[i] + Rat::from_integer(val_rat(&c, &t.p).into()))
                }
            })
            .collect();
    }
    let mut groups: BTreeMap<&Rat, Vec<usize>> = BTreeMap::new();
    for (j, s) in t.d_right.iter().enumerate() {
        if !x[j].is_zero() {
            groups.entry(s).or_default().push(j);
        }
    }
    (0..t.dim())
        .map(|i| {
            let mut best: Option<(Rat, usize)> = None;
            for (s, cols) in &groups {
                let c = cols
                    .iter()
                    .fold(Rat::zero(), |acc, &j| acc + &t.m[(i, j)] * &x[j]);
                if c.is_zero() {
                    continue;
                }
                let v = *s + Rat::from_integer(val_rat(&c, &t.p).into());
                best = match best {
                    None => Some((v, 1)),
                    Some((b, _)) if v < b => Some((v, 1)),
                    Some((b, k)) if v == b => Some((b, k + 1)),
                    keep => keep,
                };
            }
            match best {
                None => CoordVal::Zero,
                Some((v, 1)) => CoordVal::Exact(&t.d_left[i] + v),
                Some((v, _)) => CoordVal::AtLeast(&t.d_left[i] + v),
            }
        })
        .collect()
}

/// Exponent `e` with `||a_v x||_v = p^e`: `(upper, lower)`, `lower` absent
/// when no coordinate has a certified valuation.
fn local_exponent(t: &LocalTwist, x: &[Rat]) -> (Rat, Option<Rat>) {
    let vals = coordinate_valuations(t, x);
    let mut upper: Option<Rat> = None;
    let mut lower: Option<Rat> = None;
    for v in vals {
        match v {
            CoordVal::Zero => {}
            CoordVal::Exact(v) => {
                let e = -v;
                if upper.as_ref().is_none_or(|u| e > *u) {
                    upper = Some(e.clone());
                }
                if lower.as_ref().is_none_or(|l| e > *l) {
                    lower = Some(e);
                }
            }
            CoordVal::AtLeast(v) => {
                let e = -v;
                if upper.as_ref().is_none_or(|u| e > *u) {
                    upper = Some(e);
                }
            }
        }
    }
    (upper.expect("invertible local matrix maps x != 0 to a nonzero vector"), lower)
}

fn check_vector(b: &Bundle, x: &[Rat]) -> Result<()> {
    if x.len() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: x.len(),
        });
    }
    if x.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

struct Assembly {
    upper: BTreeMap<BigUint, Rat>,
    lower: Option<BTreeMap<BigUint, Rat>>,
}

impl Assembly {
    fn new() -> Self {
        Self {
            upper: BTreeMap::new(),
            lower: Some(BTreeMap::new()),
        }
    }

    fn add(&mut self, p: &BigUint, upper: Rat, lower: Option<Rat>) {
        *self.upper.entry(p.clone()).or_insert_with(Rat::zero) += upper;
        match (lower, self.lower.as_mut()) {
            (Some(l), Some(map)) => *map.entry(p.clone()).or_insert_with(Rat::zero) += l,
            _ => self.lower = None,
        }
    }

    fn finish(self, arch: &ExactPosReal) -> HeightResult {
        let build = |m: &BTreeMap<BigUint, Rat>| -> ExactPosReal {
            m.iter()
                .map(|(p, r)| ExactPosReal::prime_pow(p.clone(), r.clone()))
                .fold(arch.clone(), |a, f| &a * &f)
        };
        let upper = build(&self.upper);
        match self.lower {
            Some(l) if l == self.upper => HeightResult::Exact(upper),
            Some(l) => HeightResult::Interval {
                lower: Some(build(&l)),
                upper,
            },
            None => HeightResult::Interval { lower: None, upper },
        }
    }
}

fn add_twists(b: &Bundle, x: &[Rat], acc: &mut Assembly) {
    for t in b.twists() {
        let (u, l) = local_exponent(t, x);
        acc.add(&t.p, &t.weight * u, l.map(|l| &t.weight * l));
    }
}

/// Height of a nonzero rational vector: archimedean `sqrt(x^T G x)`, twisted
/// local norms weighted by their class weights, and the sup norm with the
/// residual weight at every prime dividing a coordinate.
pub fn height(b: &Bundle, x: &[Rat]) -> Result<HeightResult> {
    check_vector(b, x)?;
    let arch = ExactPosReal::sqrt_rational(&b.gram().quad_form(x)?)?;
    let residual = b.twist_primes();
    let mut primes: BTreeSet<BigUint> = residual.keys().cloned().collect();
    for xi in x.iter().filter(|xi| !xi.is_zero()) {
        primes.extend(factorize(xi.numer().magnitude())?.into_keys());
        primes.extend(factorize(xi.denom().magnitude())?.into_keys());
    }
    let mut acc = Assembly::new();
    for p in &primes {
        let w = residual.get(p).cloned().unwrap_or_else(Rat::one);
        if w.is_zero() {
            continue;
        }
        let min_v = x
            .iter()
            .filter(|xi| !xi.is_zero())
            .map(|xi| val_rat(xi, p))
            .min()
            .expect("nonzero vector");
        let e = &w * Rat::from_integer(BigInt::from(-min_v));
        acc.add(p, e.clone(), Some(e));
    }
    add_twists(b, x, &mut acc);
    Ok(acc.finish(&arch))
}

/// Height of a primitive integer vector, where the residual sup norms are all 1.
pub fn height_primitive(b: &Bundle, y: &[BigInt]) -> Result<HeightResult> {
    let x: Vec<Rat> = y.iter().cloned().map(Rat::from_integer).collect();
    check_vector(b, &x)?;
    debug_assert!(
        y.iter().fold(BigInt::zero(), |g, v| num_integer::Integer::gcd(&g, v)).is_one()
    );
    let arch = ExactPosReal::sqrt_rational(&b.gram().quad_form(&x)?)?;
    let mut acc = Assembly::new();
    add_twists(b, &x, &mut acc);
    Ok(acc.finish(&arch))
}
