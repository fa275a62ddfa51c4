//! Dual, direct sum, tensor, symmetric and exterior powers.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{Bundle, Gram, LocalTwist};
use crate::error::{Error, Result};
use crate::linalg::{combinations, compositions, multi_factorial, multiset_permanent, RatMatrix};
use crate::primes::{binomial, factorial};
use crate::rational::Rat;

pub const DEFAULT_DIMENSION_CAP: usize = 5000;

pub fn dual(b: &Bundle) -> Result<Bundle> {
    let twists = b
        .twists()
        .iter()
        .map(|t| {
            Ok(LocalTwist {
                p: t.p.clone(),
                weight: t.weight.clone(),
                d_left: t.d_left.iter().map(|d| -d).collect(),
                m: t.m.transpose().inverse()?,
                d_right: t.d_right.iter().map(|d| -d).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Bundle::new(b.dim(), b.gram().inverse()?, twists)
}

/// Pairs up the twists of `a` and `b` prime by prime: the listed classes at a
/// prime are laid end to end on `[0, 1]` (residual last) and cut at the union
/// of their endpoints. Pieces where both sides are residual are dropped.
fn align<'a>(
    a: &'a Bundle,
    b: &'a Bundle,
) -> Vec<(BigUint, Rat, Option<&'a LocalTwist>, Option<&'a LocalTwist>)> {
    let primes: BTreeSet<&BigUint> = a.twists().iter().chain(b.twists()).map(|t| &t.p).collect();
    let mut out = Vec::new();
    for p in primes {
        let layout = |bd: &'a Bundle| -> Vec<(Rat, &'a LocalTwist)> {
            let mut end = Rat::zero();
            bd.twists()
                .iter()
                .filter(|t| &t.p == p)
                .map(|t| {
                    end += &t.weight;
                    (end.clone(), t)
                })
                .collect()
        };
        let la = layout(a);
        let lb = layout(b);
        let mut cuts: Vec<Rat> = la.iter().chain(&lb).map(|(e, _)| e.clone()).collect();
        cuts.push(Rat::one());
        cuts.sort();
        cuts.dedup();
        let find = |l: &[(Rat, &'a LocalTwist)], x: &Rat| -> Option<&'a LocalTwist> {
            l.iter().find(|(end, _)| x < end).map(|(_, t)| *t)
        };
        let mut start = Rat::zero();
        for end in cuts {
            if end <= start {
                continue;
            }
            let (ta, tb) = (find(&la, &start), find(&lb, &start));
            if ta.is_some() || tb.is_some() {
                out.push((p.clone(), &end - &start, ta, tb));
            }
            start = end;
        }
    }
    out
}

fn or_identity(t: Option<&LocalTwist>, p: &BigUint, n: usize) -> LocalTwist {
    t.cloned()
        .unwrap_or_else(|| LocalTwist::identity(p.clone(), Rat::one(), n))
}

pub fn direct_sum(a: &Bundle, b: &Bundle) -> Result<Bundle> {
    let (na, nb) = (a.dim(), b.dim());
    let gram = match (a.gram(), b.gram()) {
        (Gram::Diagonal(x), Gram::Diagonal(y)) => Gram::Diagonal(x.iter().chain(y).cloned().collect()),
        (x, y) => Gram::Dense(x.to_matrix().block_diag(&y.to_matrix())),
    };
    let twists = align(a, b)
        .into_iter()
        .map(|(p, w, ta, tb)| {
            let ta = or_identity(ta, &p, na);
            let tb = or_identity(tb, &p, nb);
            LocalTwist {
                p,
                weight: w,
                d_left: ta.d_left.iter().chain(&tb.d_left).cloned().collect(),
                m: ta.m.block_diag(&tb.m),
                d_right: ta.d_right.iter().chain(&tb.d_right).cloned().collect(),
            }
        })
        .collect();
    Bundle::new(na + nb, gram, twists)
}

fn kron_sum(x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a + b))
        .collect()
}

/// Tensor product; coordinate `(i, k)` sits at index `i * dim(b) + k`.
pub fn tensor(a: &Bundle, b: &Bundle) -> Result<Bundle> {
    let (na, nb) = (a.dim(), b.dim());
    let gram = match (a.gram(), b.gram()) {
        (Gram::Diagonal(x), Gram::Diagonal(y)) => {
            Gram::Diagonal(x.iter().flat_map(|g| y.iter().map(move |h| g * h)).collect())
        }
        (x, y) => Gram::Dense(x.to_matrix().kron(&y.to_matrix())),
    };
    let twists = align(a, b)
        .into_iter()
        .map(|(p, w, ta, tb)| {
            let ta = or_identity(ta, &p, na);
            let tb = or_identity(tb, &p, nb);
            LocalTwist {
                p,
                weight: w,
                d_left: kron_sum(&ta.d_left, &tb.d_left),
                m: ta.m.kron(&tb.m),
                d_right: kron_sum(&ta.d_right, &tb.d_right),
            }
        })
        .collect();
    Bundle::new(na * nb, gram, twists)
}

fn check_cap(what: &'static str, dim: &BigUint, cap: usize) -> Result<usize> {
    if *dim > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what,
            requested: u128::try_from(dim).unwrap_or(u128::MAX),
            cap: cap as u128,
        });
    }
    Ok(usize::try_from(dim).expect("below cap"))
}

/// Monomial basis of `S^l` of an `n`-dimensional space, descending lex.
pub fn sym_power_basis(n: usize, l: usize) -> Vec<Vec<u32>> {
    compositions(n, l)
}

fn dot(alpha: &[u32], d: &[Rat]) -> Rat {
    alpha
        .iter()
        .zip(d)
        .filter(|(&a, _)| a > 0)
        .fold(Rat::zero(), |acc, (&a, x)| acc + Rat::from_integer(a.into()) * x)
}

/// `S^l(E)` on the monomial basis, with
/// `<e^a, e^b> = per(G[a|b]) / l!`.
pub fn sym_power(b: &Bundle, l: usize, cap: usize) -> Result<Bundle> {
    if l == 0 {
        return Err(Error::InvalidInput("symmetric power needs l >= 1".into()));
    }
    let n = b.dim();
    let dim = check_cap(
        "symmetric power dimension",
        &binomial((l + n - 1) as u64, (n - 1) as u64),
        cap,
    )?;
    let basis = sym_power_basis(n, l);
    debug_assert_eq!(basis.len(), dim);
    let lfact = Rat::from_integer(BigInt::from(factorial(l as u64)));
    let gram = match b.gram() {
        Gram::Diagonal(d) => Gram::Diagonal(
            basis
                .iter()
                .map(|a| {
                    let g = a
                        .iter()
                        .zip(d)
                        .fold(Rat::one(), |acc, (&k, x)| acc * crate::linalg::pow_rat(x, k));
                    g * Rat::from_integer(multi_factorial(a)) / &lfact
                })
                .collect(),
        ),
        Gram::Dense(g) => {
            let mut out = RatMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in i..dim {
                    let v = multiset_permanent(g, &basis[i], &basis[j]) / &lfact;
                    out[(j, i)] = v.clone();
                    out[(i, j)] = v;
                }
            }
            Gram::from_matrix(out)
        }
    };
    let twists = b
        .twists()
        .iter()
        .map(|t| {
            Ok(LocalTwist {
                p: t.p.clone(),
                weight: t.weight.clone(),
                d_left: basis.iter().map(|a| dot(a, &t.d_left)).collect(),
                m: t.m.sym_power(l)?,
                d_right: basis.iter().map(|a| dot(a, &t.d_right)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Bundle::new(dim, gram, twists)
}

/// `wedge^l(E)` on the basis `e_I`, `I` lex-ordered `l`-subsets.
pub fn ext_power(b: &Bundle, l: usize, cap: usize) -> Result<Bundle> {
    let n = b.dim();
    if l == 0 || l > n {
        return Err(Error::InvalidInput(format!(
            "exterior power needs 1 <= l <= {n}, got {l}"
        )));
    }
    let dim = check_cap(
        "exterior power dimension",
        &binomial(n as u64, l as u64),
        cap,
    )?;
    let subsets = combinations(n, l);
    let sum = |s: &[usize], d: &[Rat]| s.iter().fold(Rat::zero(), |acc, &i| acc + &d[i]);
    let gram = match b.gram() {
        Gram::Diagonal(d) => Gram::Diagonal(
            subsets
                .iter()
                .map(|s| s.iter().fold(Rat::one(), |acc, &i| acc * &d[i]))
                .collect(),
        ),
        Gram::Dense(g) => Gram::from_matrix(g.compound(l)?),
    };
    debug_assert_eq!(gram.dim(), dim);
    let twists = b
        .twists()
        .iter()
        .map(|t| {
            Ok(LocalTwist {
                p: t.p.clone(),
                weight: t.weight.clone(),
                d_left: subsets.iter().map(|s| sum(s, &t.d_left)).collect(),
                m: t.m.compound(l)?,
                d_right: subsets.iter().map(|s| sum(s, &t.d_right)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Bundle::new(dim, gram, twists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{height, slope, SlopeValue};
    use crate::exact::ExactPosReal;
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

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&Bundle::standard(3)).unwrap(), Bundle::standard(3));
        let e = e_q(rat(1, 4));
        let d = dual(&e).unwrap();
        assert_eq!(slope(&d).unwrap(), slope(&e).unwrap().neg());
        assert_eq!(dual(&d).unwrap(), e);
    }

    #[test]
    fn sum_examples() {
        assert_eq!(
            direct_sum(&Bundle::standard(2), &Bundle::standard(3)).unwrap(),
            Bundle::standard(5)
        );
        let a = a_n(3);
        let s = direct_sum(&a, &Bundle::standard(1)).unwrap();
        assert_eq!(slope(&s).unwrap(), slope(&a).unwrap().scale(&rat(3, 4)));
        let e = e_q(rat(1, 4));
        let s = direct_sum(&e, &a).unwrap();
        let x = [int(1), int(3)];
        let padded = [int(1), int(3), int(0), int(0), int(0)];
        assert_eq!(height(&s, &padded).unwrap(), height(&e, &x).unwrap());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor(&Bundle::standard(2), &Bundle::standard(3)).unwrap(),
            Bundle::standard(6)
        );
        let e = e_q(rat(1, 4));
        let t = tensor(&e, &e).unwrap();
        assert_eq!(t.twists().len(), 2);
        assert_eq!(
            slope(&t).unwrap(),
            SlopeValue::log_rational(&int(5), &rat(-1, 4)).unwrap()
        );
        let h = height(&t, &[int(1), int(0), int(0), int(-1)]).unwrap();
        let want = &ExactPosReal::from_int(2).sqrt()
            * &ExactPosReal::prime_pow(5u32.into(), rat(1, 4));
        assert_eq!(h.exact().unwrap(), &want);
    }

    #[test]
    fn sym_examples() {
        assert_eq!(sym_power(&Bundle::standard(3), 1, 5000).unwrap(), Bundle::standard(3));
        let s = sym_power(&Bundle::standard(2), 2, 5000).unwrap();
        assert_eq!(
            s.gram(),
            &Gram::Diagonal(vec![int(1), rat(1, 2), int(1)])
        );
        // slope is the average of the line slopes (1/2) log(l!/i!)
        for (n, l) in [(2, 3), (3, 2), (3, 4)] {
            let s = sym_power(&Bundle::standard(n), l, 5000).unwrap();
            let basis = sym_power_basis(n, l);
            let lf = factorial(l as u64);
            let mut total = SlopeValue::zero();
            for a in &basis {
                let r = Rat::new(BigInt::from(lf.clone()), multi_factorial(a));
                total = total.add(&SlopeValue::log_rational(&r, &rat(1, 2)).unwrap());
            }
            let want = total.scale(&Rat::new(1.into(), BigInt::from(basis.len())));
            assert_eq!(slope(&s).unwrap(), want);
        }
        assert!(matches!(
            sym_power(&Bundle::standard(10), 10, 5000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn sym_gram_matches_change_of_basis() {
        // G = A^T A with A upper triangular; S(G) = S(A)^T diag(g!/l!) S(A)
        let a = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 2, 1], &[0, 0, 1]]);
        let g = a.transpose().mul(&a).unwrap();
        let b = Bundle::new(3, Gram::from_matrix(g), vec![]).unwrap();
        for l in 1..4 {
            let s = sym_power(&b, l, 5000).unwrap();
            let sa = a.sym_power(l).unwrap();
            let basis = sym_power_basis(3, l);
            let lf = Rat::from_integer(BigInt::from(factorial(l as u64)));
            let d: Vec<Rat> = basis
                .iter()
                .map(|c| Rat::from_integer(multi_factorial(c)) / &lf)
                .collect();
            let want = sa
                .transpose()
                .mul(&RatMatrix::diagonal(&d))
                .unwrap()
                .mul(&sa)
                .unwrap();
            assert_eq!(s.gram().to_matrix(), want);
        }
    }

    #[test]
    fn ext_examples() {
        let a = a_n(4);
        assert_eq!(ext_power(&a, 1, 5000).unwrap(), a);
        assert_eq!(ext_power(&Bundle::standard(4), 2, 5000).unwrap(), Bundle::standard(6));
        for l in 1..=4 {
            let e = ext_power(&a, l, 5000).unwrap();
            assert_eq!(
                slope(&e).unwrap(),
                SlopeValue::log_rational(&int(5), &rat(-(l as i64), 8)).unwrap()
            );
        }
        assert!(ext_power(&a, 5, 5000).is_err());
        assert!(ext_power(&a, 0, 5000).is_err());
    }

    #[test]
    fn alignment_refines_unequal_weights() {
        let t = |w: Rat, d: i64| LocalTwist {
            p: 3u32.into(),
            weight: w,
            d_left: vec![int(d)],
            m: RatMatrix::identity(1),
            d_right: vec![int(0)],
        };
        let a = Bundle::new(1, Gram::identity(1), vec![t(rat(1, 3), 1)]).unwrap();
        let b = Bundle::new(1, Gram::identity(1), vec![t(rat(1, 2), 2), t(rat(1, 4), -1)]).unwrap();
        let ab = tensor(&a, &b).unwrap();
        let w: Vec<Rat> = ab.twists().iter().map(|t| t.weight.clone()).collect();
        assert_eq!(w, vec![rat(1, 3), rat(1, 6), rat(1, 4)]);
        assert_eq!(
            slope(&ab).unwrap(),
            slope(&a).unwrap().add(&slope(&b).unwrap())
        );
    }
}
