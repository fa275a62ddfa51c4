//! The lcm `p(n, l)` of the multinomial coefficients `l! / (i_1! ... i_n!)`,
//! its product formula, and the integers `q`, `r`, `s` that sandwich it.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{binomial, factorial, legendre, primes_upto};
use crate::rational::Rat;

pub const DEFAULT_COMPOSITION_CAP: u128 = 5_000_000;
pub const DEFAULT_TUPLE_CAP: u128 = 1_000_000;

/// `lcm(1, ..., m)` as a product of maximal prime powers.
pub fn lcm_upto(m: u64) -> Result<BigUint> {
    if m < 1 {
        return Err(Error::InvalidInput("lcm_upto needs m >= 1".into()));
    }
    Ok(d_floor(m))
}

/// `d(x) = lcm(1, ..., [x])`, with `d(x) = 1` for `x < 2`.
pub fn d_of(x: &Rat) -> BigUint {
    let f = x.floor().to_integer();
    if f < 1.into() {
        return BigUint::one();
    }
    d_floor(f.try_into().expect("argument of d fits in u64"))
}

fn d_floor(m: u64) -> BigUint {
    let mut out = BigUint::one();
    for p in primes_upto(m) {
        let mut pk = p;
        while pk <= m / p {
            pk *= p;
        }
        out *= pk;
    }
    out
}

pub fn composition_count(n: u64, l: u64) -> BigUint {
    binomial(l + n - 1, n - 1)
}

/// `l! / prod i_j!`.
pub fn multinomial(l: u64, i: &[u32]) -> Result<BigUint> {
    let total: u64 = i.iter().map(|&x| x as u64).sum();
    if total != l {
        return Err(Error::InvalidInput(format!(
            "composition sums to {total}, expected {l}"
        )));
    }
    let den = i
        .iter()
        .fold(BigUint::one(), |acc, &k| acc * factorial(k as u64));
    Ok(factorial(l) / den)
}

/// The largest `v_p(l!/i!)` over all compositions, and the first composition
/// (in lexicographic order) attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeMax {
    pub valuation: u64,
    pub argmax: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForce {
    pub value: BigUint,
    pub compositions: u64,
    pub per_prime: BTreeMap<u64, PrimeMax>,
}

impl BruteForce {
    pub fn reassembled(&self) -> BigUint {
        self.per_prime
            .iter()
            .fold(BigUint::one(), |acc, (&p, m)| acc * BigUint::from(p).pow(m.valuation as u32))
    }
}

struct Acc {
    count: u64,
    best: Vec<(u64, Vec<u32>)>,
}

/// Visits the compositions of `left` into `cur[k..]` in lexicographic order.
fn walk(k: usize, left: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if k + 1 == cur.len() {
        cur[k] = left;
        f(cur);
        return;
    }
    for x in 0..=left {
        cur[k] = x;
        walk(k + 1, left - x, cur, f);
    }
}

/// `p(n, l)` as an lcm over every composition, together with the per-prime
/// maximal valuations computed independently by Legendre's formula.
pub fn p_bruteforce(n: u64, l: u64, cap: u128) -> Result<BruteForce> {
    if n < 1 || l < 1 {
        return Err(Error::InvalidInput("p(n, l) needs n, l >= 1".into()));
    }
    let count = composition_count(n, l);
    if count > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what: "compositions",
            requested: u128::try_from(&count).unwrap_or(u128::MAX),
            cap,
        });
    }
    let primes = primes_upto(l);
    // leg[k][m] = v_{p_k}(m!)
    let leg: Vec<Vec<u64>> = primes
        .iter()
        .map(|&p| (0..=l).map(|m| legendre(m, p)).collect())
        .collect();
    let mut fact = vec![BigUint::one()];
    for m in 1..=l {
        let next = &fact[m as usize - 1] * m;
        fact.push(next);
    }
    let n = n as usize;

    let chunks: Vec<Acc> = (0..=l as u32)
        .into_par_iter()
        .map(|first| {
            let mut acc = Acc {
                count: 0,
                best: primes.iter().map(|_| (0, Vec::new())).collect(),
            };
            let mut cur = vec![0u32; n];
            cur[0] = first;
            let mut visit = |c: &[u32]| {
                acc.count += 1;
                for (k, table) in leg.iter().enumerate() {
                    let v = table[l as usize] - c.iter().map(|&x| table[x as usize]).sum::<u64>();
                    if v > acc.best[k].0 || acc.best[k].1.is_empty() {
                        acc.best[k] = (v, c.to_vec());
                    }
                }
            };
            if n == 1 {
                if first as u64 == l {
                    visit(&cur);
                }
            } else {
                walk(1, l as u32 - first, &mut cur, &mut visit);
            }
            acc
        })
        .collect();

    let mut compositions = 0;
    let mut best: Vec<(u64, Vec<u32>)> = primes.iter().map(|_| (0, Vec::new())).collect();
    for acc in chunks {
        compositions += acc.count;
        for (k, cand) in acc.best.into_iter().enumerate() {
            if !cand.1.is_empty() && (best[k].1.is_empty() || cand.0 > best[k].0) {
                best[k] = cand;
            }
        }
    }
    // every prime attains its largest exponent at its argmax, so the lcm of
    // those multinomials is the lcm of all of them
    let mut argmaxes: Vec<&Vec<u32>> = best.iter().map(|(_, c)| c).collect();
    argmaxes.sort();
    argmaxes.dedup();
    let mut value = if compositions > 0 { BigUint::one() } else { BigUint::zero() };
    for c in argmaxes.into_iter().filter(|c| !c.is_empty()) {
        let den = c.iter().fold(BigUint::one(), |a, &k| a * &fact[k as usize]);
        value = value.lcm(&(&fact[l as usize] / den));
    }
    let per_prime = primes
        .iter()
        .zip(best)
        .map(|(&p, (valuation, argmax))| (p, PrimeMax { valuation, argmax }))
        .collect();
    let out = BruteForce {
        value,
        compositions,
        per_prime,
    };
    if out.reassembled() != out.value {
        return Err(Error::Internal(format!(
            "per-prime valuations of p({n}, {l}) do not reassemble the lcm"
        )));
    }
    Ok(out)
}

/// `prod_{j=1}^{n-1} d([(l+n-1)/j]) / (l+j)`, evaluated exactly.
pub fn p_closed_form(n: u64, l: u64) -> Result<BigUint> {
    if n < 1 || l < 1 {
        return Err(Error::InvalidInput("p(n, l) needs n, l >= 1".into()));
    }
    let mut prod = Rat::one();
    for j in 1..n {
        let d = d_floor((l + n - 1) / j);
        prod *= Rat::new(d.into(), (l + j).into());
    }
    if !prod.is_integer() {
        return Err(Error::Internal(format!(
            "product formula for p({n}, {l}) is not an integer: {prod}"
        )));
    }
    Ok(prod.to_integer().try_into().expect("positive"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainValues {
    pub q: BigUint,
    pub r: BigUint,
    pub s: BigUint,
}

impl ChainValues {
    /// `r | s`, `s | q` and `q | r`.
    pub fn divisibilities(&self) -> [bool; 3] {
        [
            self.s.is_multiple_of(&self.r),
            self.q.is_multiple_of(&self.s),
            self.r.is_multiple_of(&self.q),
        ]
    }
}

/// `q = ((l+n-1)!/l!) p(n,l)` from the brute-force lcm.
pub fn q_value(n: u64, l: u64, cap: u128) -> Result<BigUint> {
    if n == 1 {
        return Ok(BigUint::one());
    }
    let p = p_bruteforce(n, l, cap)?.value;
    Ok(factorial(l + n - 1) / factorial(l) * p)
}

pub fn r_value(n: u64, l: u64) -> BigUint {
    (1..n).fold(BigUint::one(), |acc, k| acc * d_floor((l + n - 1) / k))
}

/// lcm of `j_1 ... j_{n-1}` over `1 <= j_{n-1} < ... < j_1 <= l+n-1`.
pub fn s_value(n: u64, l: u64, cap: u128) -> Result<BigUint> {
    if n == 1 {
        return Ok(BigUint::one());
    }
    let top = l + n - 1;
    let k = (n - 1) as usize;
    let count = binomial(top, n - 1);
    if count > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what: "decreasing tuples",
            requested: u128::try_from(&count).unwrap_or(u128::MAX),
            cap,
        });
    }
    let subsets = crate::linalg::combinations(top as usize, k);
    Ok(subsets
        .par_iter()
        .map(|s| s.iter().fold(BigUint::one(), |a, &j| a * BigUint::from(j as u64 + 1)))
        .reduce(BigUint::one, |a, b| a.lcm(&b)))
}

pub fn chain_qrs(n: u64, l: u64, composition_cap: u128, tuple_cap: u128) -> Result<ChainValues> {
    if n < 1 || l < 1 {
        return Err(Error::InvalidInput("q, r, s need n, l >= 1".into()));
    }
    let out = ChainValues {
        q: q_value(n, l, composition_cap)?,
        r: r_value(n, l),
        s: s_value(n, l, tuple_cap)?,
    };
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub q_prev: BigUint,
    pub q: BigUint,
    pub bound: BigUint,
    /// `q(n, l) / q(n, l-1)` when the division is exact.
    pub first_quotient: Option<BigUint>,
    /// `d(1 + l/(n-1)) q(n-1, l+1) / q(n, l)` when exact.
    pub second_quotient: Option<BigUint>,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.first_quotient.is_some() && self.second_quotient.is_some()
    }
}

fn exact_quotient(a: &BigUint, b: &BigUint) -> Option<BigUint> {
    let (q, r) = a.div_rem(b);
    r.is_zero().then_some(q)
}

pub fn lemma_divisibilities(n: u64, l: u64, cap: u128) -> Result<LemmaCheck> {
    if n < 2 || l < 2 {
        return Err(Error::InvalidInput("the lemma needs n, l >= 2".into()));
    }
    let q_prev = q_value(n, l - 1, cap)?;
    let q = q_value(n, l, cap)?;
    let d = d_of(&(Rat::one() + Rat::new(l.into(), (n - 1).into())));
    let bound = d * q_value(n - 1, l + 1, cap)?;
    Ok(LemmaCheck {
        first_quotient: exact_quotient(&q, &q_prev),
        second_quotient: exact_quotient(&bound, &q),
        q_prev,
        q,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub p: BigUint,
    pub binom: BigUint,
    /// `n^l <= p C(l+n-1, n-1)`
    pub lower: bool,
    /// `p^2 <= n^(3l)`
    pub upper: bool,
    /// `C(l+n-1, n-1) p^2 <= n^(4l)`
    pub cap_4l: bool,
}

pub fn bounds_check(n: u64, l: u64) -> Result<BoundsCheck> {
    let p = p_closed_form(n, l)?;
    bounds_check_with(n, l, p)
}

pub fn bounds_check_with(n: u64, l: u64, p: BigUint) -> Result<BoundsCheck> {
    let binom = composition_count(n, l);
    let nl = BigUint::from(n).pow(u32::try_from(l).map_err(|_| Error::InvalidInput("l too large".into()))?);
    let p2 = &p * &p;
    Ok(BoundsCheck {
        lower: nl <= &p * &binom,
        upper: p2 <= nl.pow(3),
        cap_4l: &binom * &p2 <= nl.pow(4),
        p,
        binom,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiCheck {
    pub checked_up_to: u64,
    pub first_failure: Option<u64>,
}

/// `d(m)^2 <= 8^m` for every `1 <= m <= x_max`.
pub fn psi_bound_check(x_max: u64) -> Result<PsiCheck> {
    if x_max < 1 {
        return Err(Error::InvalidInput("x_max must be >= 1".into()));
    }
    let mut d = BigUint::one();
    let mut first_failure = None;
    for m in 1..=x_max {
        if let Some(p) = prime_power_base(m) {
            d *= p;
        }
        if &d * &d > BigUint::one() << (3 * m) as usize {
            first_failure.get_or_insert(m);
        }
    }
    Ok(PsiCheck {
        checked_up_to: x_max,
        first_failure,
    })
}

/// `Some(p)` when `m = p^k` with `k >= 1`.
fn prime_power_base(m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let f = num_prime::nt_funcs::factorize64(m);
    (f.len() == 1).then(|| *f.keys().next().unwrap())
}
