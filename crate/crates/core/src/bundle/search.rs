//! Upper bounds for the first minimum by exhaustive search over rational lines.
//!
//! The box is the set of lines through vectors `(a_1/d_1, ..., a_n/d_n)` with
//! `|a_i| <= R` and `1 <= d_i <= D`. Lines are enumerated by their primitive
//! integer representative `y` with Fincke-Pohst pruning on `y^T G y`, using
//! `H(y) >= kappa * sqrt(y^T G y)` where `kappa` bounds the twisted local
//! norms of primitive vectors from below. Candidates are then checked against
//! the box and their heights computed exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{height_primitive, Bundle, HeightResult};
use crate::error::{Error, Result};
use crate::exact::{compare, CompareOutcome, PrecisionPolicy};
use crate::primes::primes_upto;
use crate::rational::{to_f64, val_rat, Rat};

pub const DEFAULT_NODE_CAP: u64 = 20_000_000;
const MAX_DENOM_BOUND: u64 = 40;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub node_cap: u64,
    pub policy: PrecisionPolicy,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_cap: DEFAULT_NODE_CAP,
            policy: PrecisionPolicy::default(),
        }
    }
}

/// Smallest height found and a witness. Among equal heights the witness is
/// the lexicographically greatest primitive representative whose first
/// nonzero entry is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct MinSearch {
    pub value: HeightResult,
    pub witness: Vec<BigInt>,
    /// Primitive vectors inside the box whose height was evaluated.
    pub evaluated: u64,
    pub nodes: u64,
}

/// Membership test for the line through a primitive `y`.
pub(crate) struct BoxTest {
    radius: BigInt,
    denom: BigInt,
    divisors: Vec<BigInt>,
    coord_bound: i64,
}

impl BoxTest {
    pub(crate) fn new(radius: u64, denom: u64) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidInput("search radius must be >= 1".into()));
        }
        if denom == 0 {
            return Err(Error::InvalidInput("denominator bound must be >= 1".into()));
        }
        if denom > MAX_DENOM_BOUND {
            return Err(Error::CapExceeded {
                what: "denominator bound",
                requested: denom as u128,
                cap: MAX_DENOM_BOUND as u128,
            });
        }
        // divisors of lcm(1..D)
        let mut divisors = vec![1u64];
        for p in primes_upto(denom) {
            let mut pk = 1u64;
            let mut powers = Vec::new();
            while pk * p <= denom {
                pk *= p;
                powers.push(pk);
            }
            let base = divisors.clone();
            for q in powers {
                divisors.extend(base.iter().map(|d| d * q));
            }
        }
        divisors.sort_unstable();
        let lcm = *divisors.last().expect("nonempty");
        let coord_bound = (radius as i128 * lcm as i128).min(i64::MAX as i128) as i64;
        Ok(Self {
            radius: radius.into(),
            denom: denom.into(),
            divisors: divisors.into_iter().map(BigInt::from).collect(),
            coord_bound,
        })
    }

    /// `y` is primitive. The line meets the box iff `y / w` is in it for some
    /// `w | lcm(1..D)`.
    pub(crate) fn contains(&self, y: &[BigInt]) -> bool {
        self.divisors.iter().any(|w| {
            y.iter().all(|v| {
                let g = v.gcd(w);
                w / &g <= self.denom && v.abs() / &g <= self.radius
            })
        })
    }
}

/// Lower bound on `H(y) / sqrt(y^T G y)` over primitive `y`, in natural log.
fn log_kappa(b: &Bundle) -> Result<f64> {
    let mut total = 0.0;
    for t in b.twists() {
        let inv = t.m.inverse()?;
        let n = t.dim();
        let mut min: Option<Rat> = None;
        for i in 0..n {
            for j in 0..n {
                if inv[(i, j)].is_zero() {
                    continue;
                }
                let v = Rat::from_integer(val_rat(&inv[(i, j)], &t.p).into())
                    - &t.d_right[i]
                    - &t.d_left[j];
                if min.as_ref().is_none_or(|m| v < *m) {
                    min = Some(v);
                }
            }
        }
        let min = min.expect("invertible matrix has a nonzero entry");
        total += to_f64(&(&t.weight * min)) * crate::exact::ln_biguint_f64(&t.p);
    }
    Ok(total)
}

fn cholesky(b: &Bundle) -> Result<Vec<Vec<f64>>> {
    let n = b.dim();
    let g: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| to_f64(&b.gram().entry(i, j))).collect())
        .collect();
    // q(y) = sum_i r[i][i] (y_i + sum_{j>i} r[i][j] y_j)^2
    let mut r = vec![vec![0.0; n]; n];
    let mut a = g;
    for i in 0..n {
        let d = a[i][i];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        r[i][i] = d;
        for j in i + 1..n {
            r[i][j] = a[i][j] / d;
        }
        for j in i + 1..n {
            for k in i + 1..n {
                a[j][k] -= r[i][j] * a[i][k];
            }
        }
    }
    Ok(r)
}

struct Best {
    value: HeightResult,
    witness: Vec<BigInt>,
    budget_ln: f64,
}

struct Enumerator<'a> {
    b: &'a Bundle,
    boxed: &'a BoxTest,
    opts: &'a SearchOptions,
    r: Vec<Vec<f64>>,
    log_kappa: f64,
    y: Vec<i64>,
    nodes: u64,
    evaluated: u64,
    best: Best,
}

const SLACK: f64 = 1e-6;

impl Enumerator<'_> {
    fn bound(&self) -> f64 {
        // (H_best / kappa)^2 with relative slack so ties are never pruned
        (2.0 * (self.best.budget_ln - self.log_kappa)).exp() * (1.0 + SLACK) + SLACK
    }

    fn offer(&mut self, y: Vec<BigInt>) -> Result<()> {
        let h = height_primitive(self.b, &y)?;
        self.evaluated += 1;
        let ord = match compare(h.upper(), self.best.value.upper(), &self.opts.policy) {
            CompareOutcome::Less => Ordering::Less,
            CompareOutcome::Greater => Ordering::Greater,
            // equal up to the precision cap: treated as a tie
            CompareOutcome::Equal | CompareOutcome::UndecidedAtPrecision(_) => Ordering::Equal,
        };
        let better = match ord {
            Ordering::Less => true,
            Ordering::Equal => y > self.best.witness,
            Ordering::Greater => false,
        };
        if better {
            self.best.budget_ln = h.upper().ln_f64();
            self.best.value = h;
            self.best.witness = y;
        }
        Ok(())
    }

    /// Level `i` with `rest` the already-consumed part of the quadratic form.
    fn descend(&mut self, i: usize, rest: f64, all_zero_above: bool) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.opts.node_cap {
            return Err(Error::CapExceeded {
                what: "search nodes",
                requested: self.nodes as u128,
                cap: self.opts.node_cap as u128,
            });
        }
        let n = self.y.len();
        let center: f64 = -(i + 1..n).map(|j| self.r[i][j] * self.y[j] as f64).sum::<f64>();
        let room = (self.bound() - rest).max(0.0);
        let half = (room / self.r[i][i]).sqrt();
        let cb = self.boxed.coord_bound;
        let lo_f = (center - half).ceil().max(-(cb as f64));
        let hi_f = (center + half).floor().min(cb as f64);
        let mut lo = lo_f as i64;
        let hi = hi_f as i64;
        if all_zero_above {
            // canonical sign: last nonzero entry positive
            lo = lo.max(0);
        }
        let mut v = lo;
        while v <= hi {
            self.y[i] = v;
            let t = v as f64 - center;
            let used = rest + self.r[i][i] * t * t;
            // the bound may have shrunk since this level started
            if used <= self.bound() {
                if i == 0 {
                    self.leaf()?;
                } else {
                    self.descend(i - 1, used, all_zero_above && v == 0)?;
                }
            }
            v += 1;
        }
        self.y[i] = 0;
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        if self.y.iter().all(|&v| v == 0) {
            return Ok(());
        }
        let g = self.y.iter().fold(0i64, |g, &v| g.gcd(&v));
        if g != 1 {
            return Ok(());
        }
        let mut y: Vec<BigInt> = self.y.iter().map(|&v| BigInt::from(v)).collect();
        if !self.boxed.contains(&y) {
            return Ok(());
        }
        if y.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
            y.iter_mut().for_each(|v| *v = -&*v);
        }
        self.offer(y)
    }
}

pub fn min_search(b: &Bundle, radius: u64, denom_bound: u64) -> Result<MinSearch> {
    min_search_with(b, radius, denom_bound, &SearchOptions::default())
}

pub fn min_search_with(
    b: &Bundle,
    radius: u64,
    denom_bound: u64,
    opts: &SearchOptions,
) -> Result<MinSearch> {
    let boxed = BoxTest::new(radius, denom_bound)?;
    let n = b.dim();
    // seed with the basis vectors
    let mut best: Option<(HeightResult, Vec<BigInt>)> = None;
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        let h = height_primitive(b, &e)?;
        let replace = match &best {
            None => true,
            Some((bh, _)) => compare(h.upper(), bh.upper(), &opts.policy) == CompareOutcome::Less,
        };
        if replace {
            best = Some((h, e));
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::InvalidInput("empty bundle".into()))?;
    let budget_ln = value.upper().ln_f64();
    let mut en = Enumerator {
        b,
        boxed: &boxed,
        opts,
        r: cholesky(b)?,
        log_kappa: log_kappa(b)?,
        y: vec![0; n],
        nodes: 0,
        evaluated: 0,
        best: Best {
            value,
            witness,
            budget_ln,
        },
    };
    en.descend(n - 1, 0.0, true)?;
    Ok(MinSearch {
        value: en.best.value,
        witness: en.best.witness,
        evaluated: en.evaluated,
        nodes: en.nodes,
    })
}

/// Every line meeting the box, as primitive vectors with first nonzero entry
/// positive, in lexicographic order.
pub fn lines_in_box(dim: usize, radius: u64, denom_bound: u64, cap: u64) -> Result<Vec<Vec<BigInt>>> {
    let boxed = BoxTest::new(radius, denom_bound)?;
    let side = 2 * boxed.coord_bound as u128 + 1;
    let total = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            what: "box enumeration",
            requested: total,
            cap: cap as u128,
        });
    }
    let cb = boxed.coord_bound;
    let mut out = Vec::new();
    let mut y = vec![-cb; dim];
    loop {
        let first = y.iter().find(|&&v| v != 0);
        if first.is_some_and(|&v| v > 0) && y.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1 {
            let yb: Vec<BigInt> = y.iter().map(|&v| v.into()).collect();
            if boxed.contains(&yb) {
                out.push(yb);
            }
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if y[k] < cb {
                y[k] += 1;
                break;
            }
            y[k] = -cb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Gram, LocalTwist};
    use crate::exact::ExactPosReal;
    use crate::linalg::RatMatrix;
    use crate::rational::{int, rat};

    fn a_n(n: usize) -> Bundle {
        let mut g = RatMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += int(1);
            }
        }
        Bundle::new(n, Gram::from_matrix(g), vec![]).unwrap()
    }

    fn e_q(q: Rat) -> Bundle {
        let tw = |eps: i64| LocalTwist {
            p: 5u32.into(),
            weight: rat(1, 2),
            d_left: vec![int(0), -q.clone()],
            m: RatMatrix::from_i64(&[&[1, 0], &[1, eps]]),
            d_right: vec![int(0), int(0)],
        };
        Bundle::new(2, Gram::identity(2), vec![tw(1), tw(-1)]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn box_membership() {
        let b = BoxTest::new(1, 2).unwrap();
        // (1/2, 1) ~ (1, 2)
        assert!(b.contains(&ints(&[1, 2])));
        assert!(!b.contains(&ints(&[1, 3])));
        let b = BoxTest::new(3, 4).unwrap();
        // (1/4, 3) ~ (1, 12); (1/3, 1/4) ~ (4, 3)
        assert!(b.contains(&ints(&[1, 12])));
        assert!(b.contains(&ints(&[4, 3])));
        assert!(!b.contains(&ints(&[1, 13])));
        assert!(BoxTest::new(0, 1).is_err());
    }

    #[test]
    fn standard_minimum() {
        for n in 1..6 {
            let s = min_search(&Bundle::standard(n), 1, 1).unwrap();
            assert_eq!(s.value, HeightResult::Exact(ExactPosReal::one()));
            let mut e1 = vec![BigInt::zero(); n];
            e1[0] = BigInt::one();
            assert_eq!(s.witness, e1);
        }
    }

    #[test]
    fn root_lattice_minimum() {
        for n in 1..8 {
            let s = min_search(&a_n(n), 2, 1).unwrap();
            assert_eq!(s.value.exact().unwrap(), &ExactPosReal::from_int(2).sqrt());
            assert_eq!(s.witness[0], BigInt::one());
            assert!(s.witness[1..].iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn counterexample_minimum() {
        let s = min_search(&e_q(rat(1, 4)), 3, 4).unwrap();
        assert_eq!(
            s.value.exact().unwrap(),
            &ExactPosReal::prime_pow(5u32.into(), rat(1, 4))
        );
        assert_eq!(s.witness, ints(&[1, 0]));
    }

    #[test]
    fn pruned_search_matches_box_scan() {
        let b = e_q(rat(1, 3));
        let policy = PrecisionPolicy::default();
        let lines = lines_in_box(2, 2, 3, 1_000_000).unwrap();
        let mut best: Option<(HeightResult, Vec<BigInt>)> = None;
        for y in lines {
            let h = height_primitive(&b, &y).unwrap();
            let take = match &best {
                None => true,
                Some((bh, bw)) => match compare(h.upper(), bh.upper(), &policy) {
                    CompareOutcome::Less => true,
                    CompareOutcome::Equal => y > *bw,
                    _ => false,
                },
            };
            if take {
                best = Some((h, y));
            }
        }
        let s = min_search(&b, 2, 3).unwrap();
        let (h, w) = best.unwrap();
        assert_eq!(s.value, h);
        assert_eq!(s.witness, w);
    }

    #[test]
    fn node_cap_is_an_error() {
        let opts = SearchOptions {
            node_cap: 3,
            ..Default::default()
        };
        assert!(matches!(
            min_search_with(&a_n(4), 2, 1, &opts),
            Err(Error::CapExceeded { .. })
        ));
    }
}
