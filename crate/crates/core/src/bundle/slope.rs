use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Bundle, LocalTwist};
use crate::error::{Error, Result};
use crate::exact::{compare, CompareOutcome, ExactPosReal, PrecisionPolicy};
use crate::linalg::{combinations, gcd_maximal_minors, primitive_integer, RatMatrix};
use crate::rational::{fmt_rat, val_rat, Rat};

/// A slope `e0 + sum r_p log p`, stored as its exponential.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlopeValue(ExactPosReal);

impl SlopeValue {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The slope `log v`.
    pub fn from_exp(v: ExactPosReal) -> Self {
        Self(v)
    }

    /// `r log q` for a positive rational `q`.
    pub fn log_rational(q: &Rat, r: &Rat) -> Result<Self> {
        Ok(Self(ExactPosReal::rational_pow(q, r)?))
    }

    /// `e^slope`.
    pub fn exp(&self) -> &ExactPosReal {
        &self.0
    }

    pub fn into_exp(self) -> ExactPosReal {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_one()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.inv())
    }

    pub fn add(&self, o: &SlopeValue) -> Self {
        Self(&self.0 * &o.0)
    }

    pub fn sub(&self, o: &SlopeValue) -> Self {
        Self(&self.0 / &o.0)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self(self.0.pow(r))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.ln_f64()
    }

    pub fn compare(&self, o: &SlopeValue, policy: &PrecisionPolicy) -> CompareOutcome {
        compare(&self.0, &o.0, policy)
    }
}

impl fmt::Display for SlopeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.0.e_coeff().is_zero() {
            parts.push(fmt_rat(self.0.e_coeff()));
        }
        for (p, r) in self.0.prime_logs() {
            parts.push(format!("{} log {p}", fmt_rat(r)));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `v_p(det M) + sum d_left + sum d_right`: the valuation of the local determinant.
fn det_valuation(t: &LocalTwist) -> Result<Rat> {
    let det = t.m.det()?;
    Ok(t.d_left.iter().chain(&t.d_right).fold(
        Rat::from_integer(val_rat(&det, &t.p).into()),
        |acc, d| acc + d,
    ))
}

/// Normalized slope: minus the weighted log of the local determinants, over the dimension.
pub fn slope(b: &Bundle) -> Result<SlopeValue> {
    let mut deg = ExactPosReal::sqrt_rational(&b.gram().det())?;
    for t in b.twists() {
        // ||det a_v|| = p^{-v(det)}
        let v = det_valuation(t)?;
        deg = &deg * &ExactPosReal::prime_pow(t.p.clone(), -(&t.weight * v));
    }
    let n = Rat::from_integer(BigInt::from(b.dim()));
    Ok(SlopeValue(deg.pow(&(-n.recip()))))
}

/// Smallest `v(c_ij) + w_i` pivoting, summed over `m` steps: the least weighted
/// valuation of a maximal minor of the `n x m` matrix `c`.
fn pivot_min_valuation(mut c: RatMatrix, weights: &[Rat], p: &num_bigint::BigUint) -> Result<Rat> {
    let (n, m) = (c.rows(), c.cols());
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    let mut total = Rat::zero();
    for _ in 0..m {
        let mut best: Option<(Rat, usize, usize)> = None;
        for &i in &rows {
            for &j in &cols {
                if c[(i, j)].is_zero() {
                    continue;
                }
                let v = &weights[i] + Rat::from_integer(val_rat(&c[(i, j)], p).into());
                if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, pi, pj) = best.ok_or(Error::DependentBasis)?;
        total += v;
        let piv = c[(pi, pj)].clone();
        for &k in &cols {
            if k == pj || c[(pi, k)].is_zero() {
                continue;
            }
            let f = &c[(pi, k)] / &piv;
            for &i in &rows {
                let t = &f * &c[(i, pj)];
                if !t.is_zero() {
                    c[(i, k)] -= t;
                }
            }
        }
        rows.retain(|&i| i != pi);
        cols.retain(|&j| j != pj);
    }
    Ok(total)
}

pub const CAUCHY_BINET_CAP: u128 = 1_000_000;

/// Least valuation of the maximal minors of `D_L M D_R B`, by Cauchy-Binet over
/// column subsets grouped by their right-shift sums.
fn cauchy_binet_min_valuation(t: &LocalTwist, b: &RatMatrix) -> Result<Rat> {
    let (n, m) = (b.rows(), b.cols());
    let subsets = combinations(n, m);
    let k = subsets.len() as u128;
    if k * k > CAUCHY_BINET_CAP {
        return Err(Error::CapExceeded {
            what: "Cauchy-Binet minor pairs",
            requested: k * k,
            cap: CAUCHY_BINET_CAP,
        });
    }
    let all: Vec<usize> = (0..m).collect();
    let det_b: Vec<Rat> = subsets
        .iter()
        .map(|j| b.submatrix(j, &all).det())
        .collect::<Result<_>>()?;
    let shift = |s: &[usize], d: &[Rat]| s.iter().fold(Rat::zero(), |acc, &i| acc + &d[i]);
    let mut exact_min: Option<Rat> = None;
    let mut tied_min: Option<Rat> = None;
    for rows in &subsets {
        let mut groups: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (cols, db) in subsets.iter().zip(&det_b) {
            if db.is_zero() {
                continue;
            }
            let dm = t.m.submatrix(rows, cols).det()?;
            if dm.is_zero() {
                continue;
            }
            *groups.entry(shift(cols, &t.d_right)).or_insert_with(Rat::zero) += dm * db;
        }
        let mut best: Option<(Rat, usize)> = None;
        for (s, c) in groups {
            if c.is_zero() {
                continue;
            }
            let v = s + Rat::from_integer(val_rat(&c, &t.p).into());
            best = match best {
                Some((b, _)) if v < b => Some((v, 1)),
                Some((b, k)) if v == b => Some((b, k + 1)),
                None => Some((v, 1)),
                keep => keep,
            };
        }
        let dl = shift(rows, &t.d_left);
        match best {
            None => {}
            Some((v, 1)) => {
                let v = dl + v;
                if exact_min.as_ref().is_none_or(|e| v < *e) {
                    exact_min = Some(v);
                }
            }
            Some((v, _)) => {
                let v = dl + v;
                if tied_min.as_ref().is_none_or(|e| v < *e) {
                    tied_min = Some(v);
                }
            }
        }
    }
    match (exact_min, tied_min) {
        (Some(e), None) => Ok(e),
        (Some(e), Some(t)) if e <= t => Ok(e),
        _ => Err(Error::Indeterminate(format!(
            "maximal minors at p = {} tie across right-shift groups",
            t.p
        ))),
    }
}

fn min_minor_valuation(t: &LocalTwist, b: &RatMatrix) -> Result<Rat> {
    let mb = t.m.mul(b)?;
    if let Some(dl) = t.folded_left() {
        return pivot_min_valuation(mb, &dl, &t.p);
    }
    let s0 = &t.d_right[0];
    if t.d_right.iter().all(|s| s == s0) {
        let w: Vec<Rat> = t.d_left.iter().map(|d| d + s0).collect();
        return pivot_min_valuation(mb, &w, &t.p);
    }
    cauchy_binet_min_valuation(t, b)
}

/// Slope of the subspace spanned by `basis` with the induced metrics:
/// `-(1/m) log H(b_1 ^ ... ^ b_m)`.
pub fn subspace_slope(b: &Bundle, basis: &[Vec<Rat>]) -> Result<SlopeValue> {
    let m = basis.len();
    if m == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    for v in basis {
        if v.len() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: b.dim(),
                found: v.len(),
            });
        }
    }
    let cols: Vec<Vec<Rat>> = basis
        .iter()
        .map(|v| primitive_integer(v).into_iter().map(Rat::from_integer).collect())
        .collect();
    let bm = RatMatrix::from_columns(&cols)?;
    if bm.rank() < m {
        return Err(Error::DependentBasis);
    }
    let gram = b.gram().restrict(&bm)?;
    let mut h = ExactPosReal::sqrt_rational(&gram.det()?)?;

    let int_rows: Vec<Vec<BigInt>> = (0..bm.rows())
        .map(|i| bm.row(i).iter().map(|x| x.to_integer()).collect())
        .collect();
    let g = gcd_maximal_minors(&int_rows);
    // sup norm of the Plucker vector at every prime, as if no place were twisted
    h = &h / &ExactPosReal::from_biguint(g.magnitude())?;
    for (p, residual) in b.twist_primes() {
        let vg = crate::rational::val_int(&g, &p);
        let undo = (Rat::one() - residual) * Rat::from_integer(vg.into());
        h = &h * &ExactPosReal::prime_pow(p, undo);
    }
    for t in b.twists() {
        let v = min_minor_valuation(t, &bm)?;
        h = &h * &ExactPosReal::prime_pow(t.p.clone(), -(&t.weight * v));
    }
    let m = Rat::from_integer(BigInt::from(m));
    Ok(SlopeValue(h.pow(&(-m.recip()))))
}
