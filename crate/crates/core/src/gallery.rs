//! Named example bundles.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::bundle::{
    height_primitive, lines_in_box, min_search_with, Bundle, Gram, HeightResult, LocalTwist,
    MinSearch, SearchOptions,
};
use crate::error::{Error, Result};
use crate::exact::{compare, compare_with_method, CompareOutcome, ExactPosReal, Method, PrecisionPolicy};
use crate::linalg::{combinations, RatMatrix};
use crate::primes::{factorial, next_prime};
use crate::rational::{fmt_rat, int, rat, Rat};

pub fn standard(n: usize) -> Result<Bundle> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    Ok(Bundle::standard(n))
}

/// The root lattice `A_n` in the basis `e_i - e_{n+1}`: Gram `I + J`.
pub fn root_lattice_an(n: usize) -> Result<Bundle> {
    if n == 0 {
        return Err(Error::InvalidInput("A_n needs n >= 1".into()));
    }
    let mut g = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] += Rat::one();
        }
    }
    Bundle::new(n, Gram::from_matrix(g), vec![])
}

/// Coordinates in `Z^{n+1}` of a vector given in the basis `e_i - e_{n+1}`.
pub fn an_to_ambient(y: &[BigInt]) -> Vec<BigInt> {
    let mut out = y.to_vec();
    out.push(-y.iter().sum::<BigInt>());
    out
}

/// `E_q`: two classes over 5 of weight 1/2 each with local matrices
/// `diag(1, pi^-q) [[1, 0], [1, +-1]]`.
pub fn counterexample_eq(q: &Rat, policy: &PrecisionPolicy) -> Result<Bundle> {
    if !q.is_positive() {
        return Err(Error::Precondition("q must be positive".into()));
    }
    let lhs = ExactPosReal::prime_pow(5u32.into(), q * int(2));
    if compare(&lhs, &ExactPosReal::from_int(2), policy) != CompareOutcome::Greater {
        return Err(Error::Precondition(format!(
            "5^(2q) > 2 fails for q = {}",
            fmt_rat(q)
        )));
    }
    let tw = |eps: i64| LocalTwist {
        p: 5u32.into(),
        weight: rat(1, 2),
        d_left: vec![Rat::zero(), -q.clone()],
        m: RatMatrix::from_i64(&[&[1, 0], &[1, eps]]),
        d_right: vec![Rat::zero(), Rat::zero()],
    };
    Bundle::new(2, Gram::identity(2), vec![tw(1), tw(-1)])
}

pub fn double_factorial(m: u64) -> BigUint {
    let mut out = BigUint::one();
    let mut k = m;
    while k > 1 {
        out *= k;
        k -= 2;
    }
    out
}

#[derive(Clone, Debug)]
pub struct MhOptions {
    /// Largest `n` for which every minor is checked.
    pub minor_cap: usize,
    /// Largest dyadic exponent `t` tried for each `c_i`.
    pub t_cap: u32,
    pub policy: PrecisionPolicy,
}

impl Default for MhOptions {
    fn default() -> Self {
        Self {
            minor_cap: 6,
            t_cap: 40,
            policy: PrecisionPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MHCertificate {
    pub n: usize,
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rat,
    /// `M(i, j) = (i + j)!!`, 1-based.
    #[serde(serialize_with = "ser_matrix")]
    pub m: RatMatrix,
    #[serde(serialize_with = "ser_display")]
    pub p: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub max_minor: BigUint,
    pub minors_checked: usize,
    /// `a_i = p^{c_i}`, `c_1 = 0`.
    #[serde(serialize_with = "ser_rats")]
    pub c: Vec<Rat>,
    pub t: Vec<u32>,
    /// How each window `sqrt(i)(1 - eps) < a_i <= sqrt(i)` was certified.
    pub window_methods: Vec<(Method, Method)>,
    /// `(a_1 ... a_n)^{1/n}`.
    pub q_invariant: ExactPosReal,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rat))
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_matrix<S: serde::Serializer>(m: &RatMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.to_rows().iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()))
}

/// Exponent `k / 2^t` with `p^{k/2^t} <= sqrt(i) < p^{(k+1)/2^t}`.
fn dyadic_floor(p: &BigUint, i: u64, t: u32, policy: &PrecisionPolicy) -> Result<BigInt> {
    let den = BigInt::one() << t;
    let sqrt_i = ExactPosReal::sqrt_rational(&int(i as i64))?;
    let f = (i as f64).ln() / 2.0 / crate::exact::ln_biguint_f64(p);
    let mut k = BigInt::from((f * 2f64.powi(t as i32)).floor() as i64);
    let at = |k: &BigInt| ExactPosReal::prime_pow(p.clone(), Rat::new(k.clone(), den.clone()));
    let decided = |o: CompareOutcome| -> Result<CompareOutcome> {
        match o {
            CompareOutcome::UndecidedAtPrecision(b) => Err(Error::Indeterminate(format!(
                "p^(k/2^{t}) against sqrt({i}) undecided at {b} bits"
            ))),
            o => Ok(o),
        }
    };
    while decided(compare(&at(&k), &sqrt_i, policy))? == CompareOutcome::Greater {
        k -= 1;
    }
    loop {
        let next = &k + 1;
        if decided(compare(&at(&next), &sqrt_i, policy))? == CompareOutcome::Greater {
            break;
        }
        k = next;
    }
    Ok(k)
}

pub fn mh_construct(n: usize, eps: &Rat, opts: &MhOptions) -> Result<(Bundle, MHCertificate)> {
    if n < 2 {
        return Err(Error::InvalidInput("the construction needs n >= 2".into()));
    }
    if n > opts.minor_cap {
        return Err(Error::CapExceeded {
            what: "dimension for the exhaustive minor check",
            requested: n as u128,
            cap: opts.minor_cap as u128,
        });
    }
    // 0 < eps < 1 - sqrt(1 - 1/n)  <=>  1 - 1/n < (1 - eps)^2 with eps < 1
    let one_minus = Rat::one() - eps;
    let nr = int(n as i64);
    if !eps.is_positive() || !one_minus.is_positive() || Rat::one() - nr.recip() >= &one_minus * &one_minus {
        return Err(Error::Precondition(format!(
            "eps = {} is outside (0, 1 - sqrt(1 - 1/{n}))",
            fmt_rat(eps)
        )));
    }
    let rows: Vec<Vec<Rat>> = (1..=n as u64)
        .map(|i| {
            (1..=n as u64)
                .map(|j| Rat::from_integer(double_factorial(i + j).into()))
                .collect()
        })
        .collect();
    let m = RatMatrix::from_rows(rows)?;
    let mut max_minor = BigUint::zero();
    let mut minors_checked = 0;
    for k in 1..=n {
        let subsets = combinations(n, k);
        for r in &subsets {
            for c in &subsets {
                let d = m.submatrix(r, c).det()?;
                if d.is_zero() {
                    return Err(Error::Precondition(format!(
                        "minor on rows {r:?}, columns {c:?} vanishes"
                    )));
                }
                let a = d.to_integer().magnitude().clone();
                if a > max_minor {
                    max_minor = a;
                }
                minors_checked += 1;
            }
        }
    }
    let p = next_prime(&max_minor);

    let mut c = vec![Rat::zero()];
    let mut ts = vec![0];
    let mut window_methods = vec![(Method::Exact, Method::Exact)];
    // certify the final windows with the exact integer route when feasible
    let strict = PrecisionPolicy {
        integer_cap_bits: opts.policy.integer_cap_bits.max(1 << 23),
        ..opts.policy
    };
    for i in 2..=n as u64 {
        let sqrt_i = ExactPosReal::sqrt_rational(&int(i as i64))?;
        let low = &sqrt_i * &ExactPosReal::from_rational(&one_minus)?;
        let mut found = None;
        for t in 1..=opts.t_cap {
            let k = dyadic_floor(&p, i, t, &opts.policy)?;
            let ci = Rat::new(k, BigInt::one() << t);
            let a = ExactPosReal::prime_pow(p.clone(), ci.clone());
            if compare(&a, &low, &opts.policy) == CompareOutcome::Greater {
                found = Some((t, ci, a));
                break;
            }
        }
        let (t, ci, a) = found.ok_or_else(|| Error::CapExceeded {
            what: "dyadic exponent t",
            requested: opts.t_cap as u128 + 1,
            cap: opts.t_cap as u128,
        })?;
        let (lo, m_lo) = compare_with_method(&a, &low, &strict);
        let (hi, m_hi) = compare_with_method(&a, &sqrt_i, &strict);
        if lo != CompareOutcome::Greater || !matches!(hi, CompareOutcome::Less | CompareOutcome::Equal) {
            return Err(Error::Internal(format!("window check failed for a_{i}")));
        }
        c.push(ci);
        ts.push(t);
        window_methods.push((m_lo, m_hi));
    }
    let total = c.iter().fold(Rat::zero(), |acc, x| acc + x);
    let q_invariant = ExactPosReal::prime_pow(p.clone(), total / nr);
    let twist = LocalTwist {
        p: p.clone(),
        weight: Rat::one(),
        d_left: c.clone(),
        m: m.clone(),
        d_right: vec![Rat::zero(); n],
    };
    let b = Bundle::new(n, Gram::identity(n), vec![twist])?;
    Ok((
        b,
        MHCertificate {
            n,
            eps: eps.clone(),
            m,
            p,
            max_minor,
            minors_checked,
            c,
            t: ts,
            window_methods,
            q_invariant,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MhSample {
    pub e1: HeightResult,
    pub e1_is_one: bool,
    pub search: MinSearch,
    /// The smallest height in the search box is at least 1.
    pub search_at_least_one: bool,
    /// Vectors with entries in `{-1, 0, 1}` checked against `a_t^{-1} sqrt(t)`,
    /// `t` the number of nonzero entries.
    pub t_checked: usize,
    pub t_failures: Vec<Vec<BigInt>>,
}

pub fn mh_sample_check(
    b: &Bundle,
    cert: &MHCertificate,
    radius: u64,
    denom_bound: u64,
    opts: &SearchOptions,
) -> Result<MhSample> {
    let n = b.dim();
    if n != cert.n {
        return Err(Error::DimensionMismatch {
            expected: cert.n,
            found: n,
        });
    }
    let one = ExactPosReal::one();
    let mut e1 = vec![BigInt::zero(); n];
    e1[0] = BigInt::one();
    let h1 = height_primitive(b, &e1)?;
    let e1_is_one = h1.exact() == Some(&one);
    let search = min_search_with(b, radius, denom_bound, opts)?;
    let search_at_least_one = match search.value.lower() {
        Some(l) => !matches!(compare(l, &one, &opts.policy), CompareOutcome::Less | CompareOutcome::UndecidedAtPrecision(_)),
        None => false,
    };
    let mut t_checked = 0;
    let mut t_failures = Vec::new();
    for y in lines_in_box(n, 1, 1, 1_000_000)? {
        let t = y.iter().filter(|v| !v.is_zero()).count();
        let bound = &ExactPosReal::prime_pow(cert.p.clone(), -cert.c[t - 1].clone())
            * &ExactPosReal::sqrt_rational(&int(t as i64))?;
        let h = height_primitive(b, &y)?;
        let ok = h.lower().is_some_and(|l| {
            matches!(compare(l, &bound, &opts.policy), CompareOutcome::Greater | CompareOutcome::Equal)
        });
        t_checked += 1;
        if !ok {
            t_failures.push(y);
        }
    }
    Ok(MhSample {
        e1: h1,
        e1_is_one,
        search,
        search_at_least_one,
        t_checked,
        t_failures,
    })
}

/// A named bundle with the exact values it is expected to have.
#[derive(Clone, Debug, Serialize)]
pub struct GalleryEntry {
    pub name: String,
    pub bundle: serde_json::Value,
    pub expected: Vec<serde_json::Value>,
}

fn expected(quantity: &str, value: impl Serialize, source: &str) -> serde_json::Value {
    json!({"quantity": quantity, "value": value, "source": source})
}

fn bundle_value(b: &Bundle) -> Result<serde_json::Value> {
    Ok(serde_json::from_str(&b.to_json())?)
}

pub fn standard_entry(n: usize) -> Result<GalleryEntry> {
    let b = standard(n)?;
    let ones = vec![1i64; n];
    Ok(GalleryEntry {
        name: format!("standard({n})"),
        bundle: bundle_value(&b)?,
        expected: vec![
            expected("slope", ExactPosReal::one(), "orthonormal basis"),
            expected("min_search", json!({"value": ExactPosReal::one(), "witness": unit_json(n)}), "basis vector"),
            expected(
                &format!("height({ones:?})"),
                ExactPosReal::sqrt_rational(&int(n as i64))?,
                "euclidean norm of the all-ones vector",
            ),
        ],
    })
}

fn unit_json(n: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[0] = 1;
    e
}

pub fn an_entry(n: usize) -> Result<GalleryEntry> {
    let b = root_lattice_an(n)?;
    let slope = ExactPosReal::rational_pow(&int(n as i64 + 1), &rat(-1, 2 * n as i64))?;
    Ok(GalleryEntry {
        name: format!("A_{n}"),
        bundle: bundle_value(&b)?,
        expected: vec![
            expected("slope", slope, "covolume sqrt(n+1) of the root lattice"),
            expected(
                "min_search",
                json!({"value": ExactPosReal::from_int(2).sqrt(), "witness": unit_json(n)}),
                "roots have squared length 2",
            ),
        ],
    })
}

pub fn eq_entry(q: &Rat) -> Result<GalleryEntry> {
    let b = counterexample_eq(q, &PrecisionPolicy::default())?;
    let five_q = ExactPosReal::prime_pow(5u32.into(), q.clone());
    Ok(GalleryEntry {
        name: format!("E_{}", fmt_rat(q)),
        bundle: bundle_value(&b)?,
        expected: vec![
            expected("slope", five_q.pow(&rat(-1, 2)), "two half-weight classes, shift -q"),
            expected("height([1, 0])", &five_q, "direct evaluation"),
            expected("height([0, 1])", &five_q, "direct evaluation"),
            expected(
                "tensor_square.height([1, 0, 0, -1])",
                &ExactPosReal::from_int(2).sqrt() * &five_q,
                "direct evaluation",
            ),
        ],
    })
}

pub fn mh_entry(n: usize, eps: &Rat) -> Result<GalleryEntry> {
    let (b, cert) = mh_construct(n, eps, &MhOptions::default())?;
    let lower = &ExactPosReal::from_biguint(&factorial(n as u64))?.pow(&rat(1, 2 * n as i64))
        * &ExactPosReal::from_rational(&(Rat::one() - eps))?;
    Ok(GalleryEntry {
        name: format!("MH(n={n}, eps={})", fmt_rat(eps)),
        bundle: bundle_value(&b)?,
        expected: vec![
            expected("height(e_1)", ExactPosReal::one(), "first column is a unit vector mod p"),
            expected("q_invariant", &cert.q_invariant, "product of the a_i to the power 1/n"),
            expected("q_invariant_lower", lower, "(1 - eps) n!^(1/2n)"),
            json!({"certificate": cert}),
        ],
    })
}
