//! Maximal slopes: exact for orthogonal sums of lines, lower bounds otherwise.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{subspace_slope, tensor, Bundle, Gram, SlopeValue};
use crate::error::{Error, Result};
use crate::exact::{CompareOutcome, ExactPosReal, PrecisionPolicy};
use crate::linalg::combinations;
use crate::rational::{val_rat, Rat};

/// For each twist, `perm[i]` is the column holding the nonzero entry of row `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWitness {
    pub perms: Vec<Vec<usize>>,
}

/// `Some` iff the Gram matrix is diagonal and every twist's `M` is monomial.
pub fn split_detect(b: &Bundle) -> Option<SplitWitness> {
    if !matches!(b.gram(), Gram::Diagonal(_)) {
        return None;
    }
    let perms = b
        .twists()
        .iter()
        .map(|t| t.m.monomial_permutation())
        .collect::<Option<Vec<_>>>()?;
    Some(SplitWitness { perms })
}

/// Slopes of the coordinate lines of a split bundle.
pub fn coordinate_line_slopes(b: &Bundle) -> Result<Vec<SlopeValue>> {
    let w = split_detect(b).ok_or(Error::NotSplit)?;
    let n = b.dim();
    let mut exps: Vec<ExactPosReal> = (0..n)
        .map(|j| ExactPosReal::sqrt_rational(&b.gram().entry(j, j)).map(|h| h.inv()))
        .collect::<Result<_>>()?;
    for (t, perm) in b.twists().iter().zip(&w.perms) {
        for (i, &j) in perm.iter().enumerate() {
            // e_j maps to pi^{dl_i + v(M_ij) + dr_j} e_i
            let v = &t.d_left[i] + Rat::from_integer(val_rat(&t.m[(i, j)], &t.p).into()) + &t.d_right[j];
            exps[j] = &exps[j] * &ExactPosReal::prime_pow(t.p.clone(), &t.weight * v);
        }
    }
    Ok(exps.into_iter().map(SlopeValue::from_exp).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    LowerBound,
}

/// Candidate subspaces for a search-mode maximal slope.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchFamily {
    /// All coordinate subspaces are tried up to this dimension; beyond it only
    /// those of codimension at most one.
    pub subset_size: usize,
    pub bases: Vec<Vec<Vec<Rat>>>,
    /// Lines through integer vectors with entries in `[-r, r]`; 0 disables.
    pub line_radius: u32,
    pub line_cap: u64,
}

impl SearchFamily {
    /// Every coordinate subspace when `n <= 12`, otherwise sizes up to 2.
    pub fn coordinate(n: usize) -> Self {
        Self {
            subset_size: if n <= 12 { n } else { 2 },
            bases: Vec::new(),
            line_radius: 0,
            line_cap: 50_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaxSlopeMode {
    ExactSplit,
    Search(SearchFamily),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxSlope {
    pub value: SlopeValue,
    pub certificate: Certificate,
    /// Basis of a subspace attaining `value`.
    pub argmax: Vec<Vec<Rat>>,
    /// Candidate subspaces whose slope was computed.
    pub candidates: usize,
    /// Candidates dropped because their slope was indeterminate.
    pub skipped: usize,
}

fn unit(n: usize, j: usize) -> Vec<Rat> {
    let mut e = vec![Rat::zero(); n];
    e[j] = Rat::one();
    e
}

struct Running<'a> {
    best: Option<(SlopeValue, Vec<Vec<Rat>>)>,
    policy: &'a PrecisionPolicy,
    candidates: usize,
    skipped: usize,
}

impl Running<'_> {
    fn offer(&mut self, s: SlopeValue, basis: Vec<Vec<Rat>>) -> Result<()> {
        self.candidates += 1;
        let take = match &self.best {
            None => true,
            Some((bs, _)) => match s.compare(bs, self.policy) {
                CompareOutcome::Greater => true,
                CompareOutcome::Less | CompareOutcome::Equal => false,
                CompareOutcome::UndecidedAtPrecision(bits) => {
                    return Err(Error::Indeterminate(format!(
                        "slopes {s} and {bs} not separated at {bits} bits"
                    )))
                }
            },
        };
        if take {
            self.best = Some((s, basis));
        }
        Ok(())
    }

    fn try_basis(&mut self, b: &Bundle, basis: Vec<Vec<Rat>>) -> Result<()> {
        match subspace_slope(b, &basis) {
            Ok(s) => self.offer(s, basis),
            Err(Error::Indeterminate(_)) => {
                self.skipped += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }
}

pub fn max_slope(b: &Bundle, mode: &MaxSlopeMode, policy: &PrecisionPolicy) -> Result<MaxSlope> {
    let n = b.dim();
    let mut run = Running {
        best: None,
        policy,
        candidates: 0,
        skipped: 0,
    };
    let certificate = match mode {
        MaxSlopeMode::ExactSplit => {
            for (j, s) in coordinate_line_slopes(b)?.into_iter().enumerate() {
                run.offer(s, vec![unit(n, j)])?;
            }
            Certificate::Exact
        }
        MaxSlopeMode::Search(f) => {
            for k in 1..=n {
                if k > f.subset_size && k + 1 < n {
                    continue;
                }
                for s in combinations(n, k) {
                    run.try_basis(b, s.iter().map(|&j| unit(n, j)).collect())?;
                }
            }
            for basis in &f.bases {
                run.try_basis(b, basis.clone())?;
            }
            if f.line_radius > 0 {
                for y in super::lines_in_box(n, f.line_radius as u64, 1, f.line_cap)? {
                    let v: Vec<Rat> = y.into_iter().map(Rat::from_integer).collect();
                    run.try_basis(b, vec![v])?;
                }
            }
            Certificate::LowerBound
        }
    };
    let (value, argmax) = run
        .best
        .ok_or_else(|| Error::Indeterminate("no candidate subspace had a certified slope".into()))?;
    Ok(MaxSlope {
        value,
        certificate,
        argmax,
        candidates: run.candidates,
        skipped: run.skipped,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaRoute {
    /// `Lambda >= exp(-mu_max)` with the exact split maximal slope.
    ExactSplitMaxSlope,
    /// `Lambda(E_1 x ... x E_N) >= exp(-sum mu_max(E_i))` for split factors
    /// whose tensor product is the bundle.
    TensorFactorization(Vec<Bundle>),
}

/// Certified lower bound for the absolute first minimum.
pub fn lambda_lower_bound(b: &Bundle, route: &LambdaRoute, policy: &PrecisionPolicy) -> Result<ExactPosReal> {
    let mu_max = |e: &Bundle| -> Result<SlopeValue> {
        if split_detect(e).is_none() {
            return Err(Error::RouteUnavailable(format!(
                "dimension {} factor is not split",
                e.dim()
            )));
        }
        Ok(max_slope(e, &MaxSlopeMode::ExactSplit, policy)?.value)
    };
    match route {
        LambdaRoute::ExactSplitMaxSlope => Ok(mu_max(b)?.neg().into_exp()),
        LambdaRoute::TensorFactorization(factors) => {
            let (first, rest) = factors
                .split_first()
                .ok_or_else(|| Error::InvalidInput("empty factorization".into()))?;
            let mut prod = first.clone();
            for f in rest {
                prod = tensor(&prod, f)?;
            }
            if &prod != b {
                return Err(Error::Precondition(
                    "factors do not tensor to the given bundle".into(),
                ));
            }
            let mut total = SlopeValue::zero();
            for f in factors {
                total = total.add(&mu_max(f)?);
            }
            Ok(total.neg().into_exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{slope, sym_power, LocalTwist};
    use crate::linalg::RatMatrix;
    use crate::primes::factorial;
    use crate::rational::{int, rat};
    use num_bigint::BigInt;

    fn a_n(n: usize) -> Bundle {
        let mut g = RatMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += int(1);
            }
        }
        Bundle::new(n, Gram::from_matrix(g), vec![]).unwrap()
    }

    fn sym_closed_form(n: u64, l: u64) -> SlopeValue {
        let lam = l / n;
        let den = factorial(lam).pow(n as u32) * num_bigint::BigUint::from(lam + 1).pow((l - n * lam) as u32);
        let r = Rat::new(BigInt::from(factorial(l)), BigInt::from(den));
        SlopeValue::log_rational(&r, &rat(1, 2)).unwrap()
    }

    #[test]
    fn detect() {
        assert!(split_detect(&Bundle::standard(4)).is_some());
        assert!(split_detect(&a_n(3)).is_none());
        assert!(split_detect(&a_n(1)).is_some());
        assert!(split_detect(&sym_power(&Bundle::standard(2), 3, 5000).unwrap()).is_some());
    }

    #[test]
    fn exact_split_examples() {
        let p = PrecisionPolicy::default();
        let m = max_slope(&Bundle::standard(4), &MaxSlopeMode::ExactSplit, &p).unwrap();
        assert!(m.value.is_zero());
        assert_eq!(m.certificate, Certificate::Exact);
        for (n, l) in [(2u64, 3u64), (3, 3), (3, 4), (4, 6)] {
            let s = sym_power(&Bundle::standard(n as usize), l as usize, 5000).unwrap();
            let m = max_slope(&s, &MaxSlopeMode::ExactSplit, &p).unwrap();
            assert_eq!(m.value, sym_closed_form(n, l));
            let lb = lambda_lower_bound(&s, &LambdaRoute::ExactSplitMaxSlope, &p).unwrap();
            assert_eq!(lb, m.value.neg().into_exp());
        }
        assert!(matches!(
            max_slope(&a_n(3), &MaxSlopeMode::ExactSplit, &p),
            Err(Error::NotSplit)
        ));
    }

    #[test]
    fn lines_match_subspace_slopes() {
        let t = LocalTwist {
            p: 3u32.into(),
            weight: rat(2, 3),
            d_left: vec![int(1), rat(-1, 2), int(0)],
            m: RatMatrix::from_i64(&[&[0, 9, 0], &[0, 0, -2], &[5, 0, 0]]),
            d_right: vec![int(0), rat(1, 3), int(2)],
        };
        let g = Gram::Diagonal(vec![int(2), rat(1, 5), int(7)]);
        let b = Bundle::new(3, g, vec![t]).unwrap();
        let lines = coordinate_line_slopes(&b).unwrap();
        for (j, s) in lines.iter().enumerate() {
            assert_eq!(s, &subspace_slope(&b, &[unit(3, j)]).unwrap());
        }
        let p = PrecisionPolicy::default();
        let exact = max_slope(&b, &MaxSlopeMode::ExactSplit, &p).unwrap();
        let search = max_slope(&b, &MaxSlopeMode::Search(SearchFamily::coordinate(3)), &p).unwrap();
        assert_eq!(exact.value, search.value);
        assert_eq!(search.certificate, Certificate::LowerBound);
        // sum of line slopes is the slope times n
        let total = lines.iter().fold(SlopeValue::zero(), |a, s| a.add(s));
        assert_eq!(total, slope(&b).unwrap().scale(&int(3)));
    }

    #[test]
    fn root_lattice_search_is_semistable() {
        let p = PrecisionPolicy::default();
        for n in 1..7 {
            let a = a_n(n);
            let m = max_slope(&a, &MaxSlopeMode::Search(SearchFamily::coordinate(n)), &p).unwrap();
            assert_eq!(m.value, slope(&a).unwrap());
            assert_eq!(m.candidates, (1 << n) - 1);
        }
        let mut f = SearchFamily::coordinate(3);
        f.line_radius = 2;
        let m = max_slope(&a_n(3), &MaxSlopeMode::Search(f), &p).unwrap();
        assert_eq!(m.value, slope(&a_n(3)).unwrap());
    }

    #[test]
    fn tensor_route() {
        let p = PrecisionPolicy::default();
        let s = sym_power(&Bundle::standard(2), 2, 5000).unwrap();
        let t = tensor(&s, &Bundle::standard(3)).unwrap();
        let route = LambdaRoute::TensorFactorization(vec![s.clone(), Bundle::standard(3)]);
        let lb = lambda_lower_bound(&t, &route, &p).unwrap();
        assert_eq!(lb, ExactPosReal::from_int(2).sqrt().inv());
        let bad = LambdaRoute::TensorFactorization(vec![s, Bundle::standard(2)]);
        assert!(lambda_lower_bound(&t, &bad, &p).is_err());
        assert!(matches!(
            lambda_lower_bound(&a_n(2), &LambdaRoute::ExactSplitMaxSlope, &p),
            Err(Error::RouteUnavailable(_))
        ));
    }
}
