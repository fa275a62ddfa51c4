use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::random;
use super::report::{Entry, Quantity, Relation};
use crate::bundle::{
    dual, direct_sum, ext_power, height, height_primitive, lambda_lower_bound, lines_in_box,
    max_slope, min_search_with, slope, subspace_slope, sym_power, tensor, Bundle, HeightResult,
    LambdaRoute, MaxSlopeMode, MinSearch, SearchFamily, SearchOptions, SlopeValue,
};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{compare, to_float, CompareOutcome, ExactPosReal, PrecisionPolicy};
use crate::gallery::{self, an_to_ambient, MhOptions};
use crate::linalg::{combinations, RatMatrix};
use crate::multinomial::{
    bounds_check_with, chain_qrs, composition_count, lcm_upto, lemma_divisibilities, p_bruteforce,
    p_closed_form, psi_bound_check, DEFAULT_COMPOSITION_CAP, DEFAULT_TUPLE_CAP,
};
use crate::primes::{factorial, legendre, primes_upto};
use crate::rational::{int, rat, Rat};

/// Shared settings for one suite run.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub config: Config,
    pub policy: PrecisionPolicy,
    /// For statements checked numerically at 256 bits.
    pub policy256: PrecisionPolicy,
    pub search: SearchOptions,
}

impl Ctx {
    pub fn new(config: &Config) -> Ctx {
        let policy = config.policy();
        Ctx {
            config: config.clone(),
            policy,
            policy256: config.policy_at(256),
            search: SearchOptions {
                policy,
                ..SearchOptions::default()
            },
        }
    }

    pub fn search(&self, b: &Bundle) -> Result<MinSearch> {
        min_search_with(b, self.config.search_radius, self.config.denom_bound, &self.search)
    }

    fn check(&self, id: &str, inst: impl Into<String>, lhs: Quantity, rel: Relation, rhs: Quantity) -> Entry {
        Entry::check(id, inst, lhs, rel, rhs, &self.policy)
    }

    fn check256(&self, id: &str, inst: impl Into<String>, lhs: Quantity, rel: Relation, rhs: Quantity) -> Entry {
        Entry::check(id, inst, lhs, rel, rhs, &self.policy256)
    }

    fn conditional(&self, id: &str, inst: impl Into<String>, lhs: Quantity, rel: Relation, rhs: Quantity) -> Entry {
        Entry::conditional(id, inst, lhs, rel, rhs, &self.policy)
    }
}

/// Runs `f`, turning an error into one `Undecided` entry.
fn guard(id: &str, inst: &str, f: impl FnOnce() -> Result<Vec<Entry>>) -> Vec<Entry> {
    f().unwrap_or_else(|e| vec![Entry::undecided(id, inst, e)])
}

fn real(v: ExactPosReal) -> Quantity {
    Quantity::Real(v)
}

fn slope_q(s: SlopeValue) -> Quantity {
    Quantity::Slope(s)
}

fn exact_height(h: &HeightResult) -> Result<Quantity> {
    h.exact()
        .cloned()
        .map(Quantity::Real)
        .ok_or_else(|| Error::Indeterminate("height is only known up to an interval".into()))
}

fn ints_json(y: &[BigInt]) -> Value {
    Value::Array(
        y.iter()
            .map(|v| match v.to_i64() {
                Some(i) => json!(i),
                None => json!(v.to_string()),
            })
            .collect(),
    )
}

fn sqrt_int(n: u64) -> ExactPosReal {
    ExactPosReal::from_int(n).sqrt()
}

fn log_rat(q: &Rat, r: &Rat) -> Result<SlopeValue> {
    SlopeValue::log_rational(q, r)
}

// ---------------------------------------------------------------------------
// lcm of multinomial coefficients

pub fn check_appendix(ctx: &Ctx) -> Vec<Entry> {
    let mut out = Vec::new();
    let grid: Vec<(u64, u64)> = (1..=6).flat_map(|n| (1..=30).map(move |l| (n, l))).collect();
    out.par_extend(grid.par_iter().flat_map_iter(|&(n, l)| {
        let inst = format!("n={n}, l={l}");
        guard("thmppcm.identity", &inst.clone(), || {
            let brute = p_bruteforce(n, l, DEFAULT_COMPOSITION_CAP)?;
            let closed = p_closed_form(n, l)?;
            let b = bounds_check_with(n, l, closed.clone())?;
            let nl = BigUint::from(n).pow(l as u32);
            Ok(vec![
                ctx.check(
                    "thmppcm.identity",
                    inst.clone(),
                    Quantity::int(brute.value.clone()),
                    Relation::Eq,
                    Quantity::int(closed.clone()),
                )
                .with_witness(json!({"compositions": brute.compositions})),
                ctx.check(
                    "thmppcm.bounds.lower",
                    inst.clone(),
                    Quantity::int(nl.clone()),
                    Relation::Le,
                    Quantity::int(&closed * &b.binom),
                ),
                ctx.check(
                    "thmppcm.bounds.upper",
                    inst,
                    Quantity::int(&closed * &closed),
                    Relation::Le,
                    Quantity::int(nl.pow(3)),
                ),
            ])
        })
    }));
    out.par_extend((1..=1000u64).into_par_iter().flat_map_iter(|l| {
        let inst = format!("l={l}");
        guard("thmppcm.williams", &inst.clone(), || {
            let p = p_bruteforce(2, l, DEFAULT_COMPOSITION_CAP)?.value;
            Ok(vec![ctx.check(
                "thmppcm.williams",
                inst,
                Quantity::int(p * BigUint::from(l + 1)),
                Relation::Eq,
                Quantity::int(lcm_upto(l + 1)?),
            )])
        })
    }));
    let grid: Vec<(u64, u64)> = (2..=5).flat_map(|n| (1..=15).map(move |l| (n, l))).collect();
    out.par_extend(grid.par_iter().flat_map_iter(|&(n, l)| {
        let inst = format!("n={n}, l={l}");
        let mut v = guard("thmppcm.chain", &inst.clone(), || {
            let c = chain_qrs(n, l, DEFAULT_COMPOSITION_CAP, DEFAULT_TUPLE_CAP)?;
            Ok(vec![
                ctx.check("thmppcm.chain.q_r", inst.clone(), Quantity::int(c.q.clone()), Relation::Eq, Quantity::int(c.r.clone())),
                ctx.check("thmppcm.chain.r_s", inst.clone(), Quantity::int(c.r), Relation::Eq, Quantity::int(c.s)),
            ])
        });
        if l >= 2 {
            v.extend(guard("thmppcm.lemma", &inst.clone(), || {
                let c = lemma_divisibilities(n, l, DEFAULT_COMPOSITION_CAP)?;
                Ok(vec![
                    ctx.check(
                        "thmppcm.lemma.step",
                        inst.clone(),
                        Quantity::int(c.q_prev),
                        Relation::Divides,
                        Quantity::int(c.q.clone()),
                    ),
                    ctx.check(
                        "thmppcm.lemma.descent",
                        inst.clone(),
                        Quantity::int(c.q),
                        Relation::Divides,
                        Quantity::int(c.bound),
                    ),
                ])
            }));
        }
        v
    }));
    out.extend(guard("thmppcm.psi", "m<=10000", || {
        let c = psi_bound_check(10_000)?;
        let good = c.first_failure.map_or(c.checked_up_to, |m| m - 1);
        let e = ctx.check(
            "thmppcm.psi",
            "m<=10000",
            Quantity::Count(good),
            Relation::Eq,
            Quantity::Count(c.checked_up_to),
        );
        Ok(vec![e.with_note("longest prefix 1..m with d(m)^2 <= 8^m")])
    }));
    out
}

// ---------------------------------------------------------------------------
// slopes

pub fn check_slopes(ctx: &Ctx) -> Vec<Entry> {
    let mut out: Vec<Entry> = (1..=50usize)
        .into_par_iter()
        .flat_map_iter(|n| {
            let inst = format!("n={n}");
            guard("slopes", &inst.clone(), || {
                let a = gallery::root_lattice_an(n)?;
                Ok(vec![
                    ctx.check(
                        "slopes.standard",
                        inst.clone(),
                        slope_q(slope(&Bundle::standard(n))?),
                        Relation::Eq,
                        slope_q(SlopeValue::zero()),
                    ),
                    ctx.check(
                        "slopes.an",
                        inst,
                        slope_q(slope(&a)?),
                        Relation::Eq,
                        slope_q(log_rat(&int(n as i64 + 1), &rat(-1, 2 * n as i64))?),
                    ),
                ])
            })
        })
        .collect();
    out.extend(guard("slopes.eq", "q=1/4", || {
        let e = gallery::counterexample_eq(&rat(1, 4), &ctx.policy)?;
        Ok(vec![ctx.check(
            "slopes.eq",
            "q=1/4",
            slope_q(slope(&e)?),
            Relation::Eq,
            slope_q(log_rat(&int(5), &rat(-1, 8))?),
        )])
    }));
    out.par_extend((1..=12usize).into_par_iter().flat_map_iter(|n| {
        let inst = format!("n={n}");
        guard("slopes.an_subsets", &inst.clone(), || {
            let a = gallery::root_lattice_an(n)?;
            let mu = slope(&a)?;
            let mut matching = 0;
            let mut total = 0;
            let mut best: Option<(SlopeValue, Vec<usize>)> = None;
            for k in 1..=n {
                let want = log_rat(&int(k as i64 + 1), &rat(-1, 2 * k as i64))?;
                for s in combinations(n, k) {
                    let basis: Vec<Vec<Rat>> = s
                        .iter()
                        .map(|&j| (0..n).map(|i| if i == j { int(1) } else { int(0) }).collect())
                        .collect();
                    let v = subspace_slope(&a, &basis)?;
                    total += 1;
                    if v == want {
                        matching += 1;
                    }
                    let better = match &best {
                        None => true,
                        Some((b, _)) => v.compare(b, &ctx.policy) == CompareOutcome::Greater,
                    };
                    if better {
                        best = Some((v, s));
                    }
                }
            }
            let (max, arg) = best.expect("n >= 1");
            Ok(vec![
                ctx.check(
                    "slopes.an_subsets",
                    inst.clone(),
                    Quantity::Count(matching),
                    Relation::Eq,
                    Quantity::Count(total),
                )
                .with_note("coordinate subspaces of size k have slope -(1/2k) log(k+1)"),
                ctx.check("slopes.an_semistable", inst, slope_q(max), Relation::Le, slope_q(mu))
                    .with_witness(json!({"argmax": arg})),
            ])
        })
    }));
    out.par_extend((0..100u64).into_par_iter().flat_map_iter(|trial| {
        let inst = format!("trial={trial}");
        guard("slopes.random", &inst.clone(), || random_slope_identities(ctx, trial, &inst))
    }));
    out
}

fn random_slope_identities(ctx: &Ctx, trial: u64, inst: &str) -> Result<Vec<Entry>> {
    let mut r = random::rng(ctx.config.seed, 1000 + trial);
    let na = r.gen_range(1..=3);
    let nb = r.gen_range(1..=3);
    let a = random::general_bundle(&mut r, na);
    let b = random::general_bundle(&mut r, nb);
    let l = r.gen_range(1..=na);
    let (sa, sb) = (slope(&a)?, slope(&b)?);
    let identity: Vec<Vec<Rat>> = (0..na)
        .map(|j| (0..na).map(|i| if i == j { int(1) } else { int(0) }).collect())
        .collect();
    let weighted = sa
        .scale(&int(na as i64))
        .add(&sb.scale(&int(nb as i64)))
        .scale(&rat(1, (na + nb) as i64));
    let witness = json!({"a": serde_json::from_str::<Value>(&a.to_json())?, "b": serde_json::from_str::<Value>(&b.to_json())?});
    Ok(vec![
        ctx.check("slopes.dual", inst, slope_q(slope(&dual(&a)?)?), Relation::Eq, slope_q(sa.neg())),
        ctx.check("slopes.tensor", inst, slope_q(slope(&tensor(&a, &b)?)?), Relation::Eq, slope_q(sa.add(&sb))),
        ctx.check(
            "slopes.ext",
            format!("{inst}, l={l}"),
            slope_q(slope(&ext_power(&a, l, ctx.config.dimension_cap)?)?),
            Relation::Eq,
            slope_q(sa.scale(&int(l as i64))),
        ),
        ctx.check("slopes.sum", inst, slope_q(slope(&direct_sum(&a, &b)?)?), Relation::Eq, slope_q(weighted)),
        ctx.check("slopes.full_basis", inst, slope_q(subspace_slope(&a, &identity)?), Relation::Eq, slope_q(sa))
            .with_witness(witness),
    ])
}

// ---------------------------------------------------------------------------
// minima

pub fn check_minima(ctx: &Ctx) -> Vec<Entry> {
    (1..=10usize)
        .into_par_iter()
        .flat_map_iter(|n| {
            let inst = format!("n={n}");
            let mut v = guard("minima.an", &inst.clone(), || {
                let s = ctx.search(&gallery::root_lattice_an(n)?)?;
                Ok(vec![ctx
                    .check("minima.an", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(sqrt_int(2)))
                    .with_witness(json!({"basis": ints_json(&s.witness), "ambient": ints_json(&an_to_ambient(&s.witness))}))])
            });
            v.extend(guard("minima.standard", &inst.clone(), || {
                let s = ctx.search(&Bundle::standard(n))?;
                Ok(vec![ctx
                    .check("minima.standard", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(ExactPosReal::one()))
                    .with_witness(ints_json(&s.witness))])
            }));
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// the counterexample E_q

pub fn check_counterexample(ctx: &Ctx, q: &Rat) -> Result<Vec<Entry>> {
    let inst = format!("q={}", crate::rational::fmt_rat(q));
    let e = gallery::counterexample_eq(q, &ctx.policy)?;
    let five = |r: Rat| ExactPosReal::prime_pow(5u32.into(), r);
    let five_q = five(q.clone());
    let five_2q = five(q * int(2));
    let root2 = sqrt_int(2);
    let mut out = vec![
        ctx.check("ce.precondition", inst.clone(), real(five_2q.clone()), Relation::Gt, real(ExactPosReal::from_int(2))),
        ctx.check(
            "ce.height_e1",
            inst.clone(),
            exact_height(&height(&e, &[int(1), int(0)])?)?,
            Relation::Eq,
            real(five_q.clone()),
        ),
        ctx.check(
            "ce.height_e2",
            inst.clone(),
            exact_height(&height(&e, &[int(0), int(1)])?)?,
            Relation::Eq,
            real(five_q.clone()),
        ),
    ];
    let t = tensor(&e, &e)?;
    let ht = height(&t, &[int(1), int(0), int(0), int(-1)])?;
    out.push(ctx.check(
        "ce.tensor_height",
        inst.clone(),
        exact_height(&ht)?,
        Relation::Eq,
        real(&root2 * &five_q),
    ));
    out.push(ctx.check("ce.strict", inst.clone(), real(&root2 * &five_q), Relation::Lt, real(five_2q.clone())));

    out.extend(guard("ce.lemma", &inst.clone(), || {
        let lines = lines_in_box(2, ctx.config.search_radius, ctx.config.denom_bound, 10_000_000)?;
        let mut total = 0u64;
        let mut good = 0u64;
        let mut min: Option<(ExactPosReal, Vec<BigInt>)> = None;
        for y in lines.into_iter().filter(|y| y.iter().all(|v| !v.is_zero())) {
            let h = height_primitive(&e, &y)?;
            let lower = h
                .lower()
                .cloned()
                .ok_or_else(|| Error::Indeterminate("no certified lower height".into()))?;
            total += 1;
            if compare(&lower, &root2, &ctx.policy) == CompareOutcome::Greater {
                good += 1;
            }
            let smaller = match &min {
                None => true,
                Some((m, _)) => compare(&lower, m, &ctx.policy) == CompareOutcome::Less,
            };
            if smaller {
                min = Some((lower, y));
            }
        }
        let (m, arg) = min.ok_or_else(|| Error::InvalidInput("empty box".into()))?;
        let box_desc = format!("{inst}, radius={}, denom<={}", ctx.config.search_radius, ctx.config.denom_bound);
        Ok(vec![
            ctx.check("ce.lemma", box_desc.clone(), Quantity::Count(good), Relation::Eq, Quantity::Count(total))
                .with_note("vectors with xy != 0 and height > sqrt 2"),
            ctx.check("ce.lemma_min", box_desc, real(m), Relation::Gt, real(root2.clone()))
                .with_witness(ints_json(&arg)),
        ])
    }));
    out.extend(guard("ce.minimum", &inst.clone(), || {
        let s = ctx.search(&e)?;
        let st = ctx.search(&t)?;
        Ok(vec![
            ctx.check("ce.search_upper", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(five_q.clone()))
                .with_witness(ints_json(&s.witness)),
            ctx.conditional("ce.minimum", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(five_q.clone()))
                .with_note("equality over all algebraic points rests on the lower bound from the second Zhang minimum"),
            ctx.conditional("ce.conclusion", inst.clone(), real(st.value.upper().clone()), Relation::Lt, real(five_2q.clone()))
                .with_witness(ints_json(&st.witness))
                .with_note("Lambda(E_q (x) E_q) < Lambda(E_q)^2 given Lambda(E_q) = 5^q"),
        ])
    }));
    Ok(out)
}

// ---------------------------------------------------------------------------
// the Minkowski-Hlawka bundles

pub fn check_mh(ctx: &Ctx, n: usize, eps: &Rat) -> Result<Vec<Entry>> {
    let inst = format!("n={n}, eps={}", crate::rational::fmt_rat(eps));
    let opts = MhOptions {
        policy: ctx.policy,
        ..MhOptions::default()
    };
    let (b, cert) = gallery::mh_construct(n, eps, &opts)?;
    let expected_minors: u64 = (1..=n as u64)
        .map(|k| {
            let c = crate::primes::binomial(n as u64, k).to_u64().expect("small");
            c * c
        })
        .sum();
    let nf = ExactPosReal::from_biguint(&factorial(n as u64))?;
    let lower = &nf.pow(&rat(1, 2 * n as i64)) * &ExactPosReal::from_rational(&(Rat::one() - eps))?;
    let sqrt_n_e = &sqrt_int(n as u64) * &ExactPosReal::exp(rat(-1, 2));
    let mut out = vec![
        ctx.check(
            "mha.construct",
            inst.clone(),
            Quantity::Count(cert.minors_checked as u64),
            Relation::Eq,
            Quantity::Count(expected_minors),
        )
        .with_witness(serde_json::to_value(&cert)?)
        .with_note("every minor nonzero and smaller than p"),
        ctx.check("mha.q_lower", inst.clone(), real(cert.q_invariant.clone()), Relation::Ge, real(lower)),
        ctx.check256("mha.q_sqrt_n_over_e", inst.clone(), real(cert.q_invariant.clone()), Relation::Ge, real(sqrt_n_e)),
    ];
    let mut e1 = vec![BigInt::zero(); n];
    e1[0] = BigInt::one();
    out.push(ctx.check(
        "mha.height_e1",
        inst.clone(),
        exact_height(&height_primitive(&b, &e1)?)?,
        Relation::Eq,
        real(ExactPosReal::one()),
    ));
    out.extend(guard("mha.search", &inst.clone(), || {
        let s = gallery::mh_sample_check(&b, &cert, ctx.config.search_radius, ctx.config.denom_bound, &ctx.search)?;
        let lower = s
            .search
            .value
            .lower()
            .cloned()
            .ok_or_else(|| Error::Indeterminate("no certified lower height".into()))?;
        let box_desc = format!("{inst}, radius={}, denom<={}", ctx.config.search_radius, ctx.config.denom_bound);
        Ok(vec![
            ctx.check("mha.search", box_desc.clone(), real(lower.clone()), Relation::Ge, real(ExactPosReal::one()))
                .with_witness(json!({"witness": ints_json(&s.search.witness), "evaluated": s.search.evaluated}))
                .with_note("smallest height in the box; vectors outside the pruning ellipsoid are excluded in floating point"),
            ctx.check(
                "mha.t_bound",
                inst.clone(),
                Quantity::Count((s.t_checked - s.t_failures.len()) as u64),
                Relation::Eq,
                Quantity::Count(s.t_checked as u64),
            )
            .with_note("H(x) >= a_t^-1 sqrt t for x in {-1,0,1}^n with t nonzero entries"),
            ctx.conditional("mha.minimum", box_desc, real(lower), Relation::Eq, real(ExactPosReal::one()))
                .with_note("Lambda = 1 over all algebraic points is not checkable by search"),
        ])
    }));
    Ok(out)
}

// ---------------------------------------------------------------------------
// symmetric powers

/// Smallest and largest `i_1! ... i_n!` over compositions of `l` into `n` parts.
fn factorial_products(n: usize, l: usize) -> (u64, u64) {
    let fact: Vec<u64> = (0..=l as u64).map(|k| (1..=k).product::<u64>().max(1)).collect();
    fn walk(k: usize, left: usize, acc: u64, fact: &[u64], n: usize, out: &mut (u64, u64)) {
        if k + 1 == n {
            let v = acc * fact[left];
            out.0 = out.0.min(v);
            out.1 = out.1.max(v);
            return;
        }
        for x in 0..=left {
            walk(k + 1, left - x, acc * fact[x], fact, n, out);
        }
    }
    let mut out = (u64::MAX, 0);
    walk(0, l, 1, &fact, n, &mut out);
    out
}

pub fn check_sym(ctx: &Ctx, n: usize, l: usize) -> Result<Vec<Entry>> {
    let inst = format!("n={n}, l={l}");
    let dim = composition_count(n as u64, l as u64);
    let lf = factorial(l as u64);
    let (min_f, max_f) = factorial_products(n, l);
    let lam = l / n;
    let closed_den = factorial(lam as u64).pow(n as u32) * BigUint::from(lam as u64 + 1).pow((l - n * lam) as u32);
    let closed = log_rat(&Rat::new(lf.clone().into(), closed_den.into()), &rat(1, 2))?;
    let (mu, route) = if dim <= BigUint::from(ctx.config.dimension_cap) {
        let s = sym_power(&Bundle::standard(n), l, ctx.config.dimension_cap)?;
        (max_slope(&s, &MaxSlopeMode::ExactSplit, &ctx.policy)?.value, "maximum over the coordinate lines of the bundle")
    } else {
        (
            log_rat(&Rat::new(lf.clone().into(), BigInt::from(min_f)), &rat(1, 2))?,
            "maximum of l!/i! over compositions (bundle above the dimension cap)",
        )
    };
    let p = p_closed_form(n as u64, l as u64)?;
    let cp2 = &dim * &p * &p;
    let ratio = &lf / BigUint::from(min_f);
    let semistable = min_f == max_f;
    Ok(vec![
        ctx.check("pentesym.closed_form", inst.clone(), slope_q(mu.clone()), Relation::Eq, slope_q(closed))
            .with_note(route),
        ctx.check("pentesym.lower", inst.clone(), slope_q(mu), Relation::Ge, slope_q(SlopeValue::zero())),
        ctx.check("pentesym.upper", inst.clone(), Quantity::int(ratio), Relation::Le, Quantity::int(cp2.clone()))
            .with_note("(l!/min i!) <= C(l+n-1, n-1) p(n,l)^2"),
        ctx.check(
            "pentesym.semistable",
            inst.clone(),
            Quantity::Count(semistable as u64),
            Relation::Eq,
            Quantity::Count((n == 1 || l == 1) as u64),
        ),
        ctx.check(
            "pentesym.cap",
            inst,
            Quantity::int(cp2),
            Relation::Le,
            Quantity::int(BigUint::from(n as u64).pow(4 * l as u32)),
        ),
    ])
}

// ---------------------------------------------------------------------------
// exterior powers

pub fn check_ext(ctx: &Ctx, n: usize, l: usize) -> Result<Vec<Entry>> {
    let inst = format!("n={n}, l={l}");
    let cap = ctx.config.dimension_cap;
    let a = gallery::root_lattice_an(n)?;
    let wa = ext_power(&a, l, cap)?;
    let mut out = vec![ctx.check(
        "ext.an_slope",
        inst.clone(),
        slope_q(slope(&wa)?),
        Relation::Eq,
        slope_q(log_rat(&int(n as i64 + 1), &rat(-(l as i64), 2 * n as i64))?),
    )];
    let ws = ext_power(&Bundle::standard(n), l, cap)?;
    let mu = max_slope(&ws, &MaxSlopeMode::ExactSplit, &ctx.policy)?.value;
    let falling = factorial(n as u64) / factorial((n - l) as u64);
    out.push(ctx.check("ext.std_lower", inst.clone(), slope_q(SlopeValue::zero()), Relation::Le, slope_q(mu.clone())));
    out.push(
        ctx.check(
            "ext.std_upper",
            inst.clone(),
            slope_q(mu),
            Relation::Le,
            slope_q(log_rat(&Rat::from_integer(falling.into()), &rat(1, 2))?),
        )
        .with_note("bound from the archimedean norm sqrt(l!) of the wedge map"),
    );
    if n <= 5 {
        let mut e = vec![BigInt::zero(); wa.dim()];
        e[0] = BigInt::one();
        out.push(ctx.check(
            "ext.an_wedge_witness",
            inst.clone(),
            exact_height(&height_primitive(&wa, &e)?)?,
            Relation::Eq,
            real(sqrt_int(l as u64 + 1)),
        ));
        out.extend(guard("ext.an_minimum", &inst.clone(), || {
            let s = ctx.search(&wa)?;
            Ok(vec![ctx
                .check("ext.an_minimum", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(sqrt_int(l as u64 + 1)))
                .with_witness(json!({"witness": ints_json(&s.witness), "wedge_of_first_l_roots": s.witness == e}))])
        }));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Zhang's sandwich

pub fn check_zhang(ctx: &Ctx, b: &Bundle, label: &str) -> Result<Vec<Entry>> {
    let n = b.dim();
    let inst = format!("{label}, dim={n}");
    let mu = max_slope(b, &MaxSlopeMode::ExactSplit, &ctx.policy)?.value;
    let lb = lambda_lower_bound(b, &LambdaRoute::ExactSplitMaxSlope, &ctx.policy)?;
    let s = ctx.search(b)?;
    let prod = s.value.upper() * mu.exp();
    let mut out = vec![
        ctx.check("tzhi.lower", inst.clone(), real(prod.clone()), Relation::Ge, real(ExactPosReal::one()))
            .with_witness(ints_json(&s.witness)),
        ctx.check256("tzhi.upper", inst.clone(), real(prod.clone()), Relation::Le, real(sqrt_int(n as u64))),
        ctx.check("tzhi.lambda", inst.clone(), real(lb), Relation::Le, real(s.value.upper().clone())),
    ];
    if n == 1 {
        out.push(ctx.check("tzhi.line", inst, real(prod), Relation::Eq, real(ExactPosReal::one())));
    }
    Ok(out)
}

fn factorial_exact(n: u64) -> ExactPosReal {
    primes_upto(n)
        .into_iter()
        .map(|p| ExactPosReal::prime_pow(p.into(), int(legendre(n, p) as i64)))
        .fold(ExactPosReal::one(), |a, f| &a * &f)
}

/// `n!^{1/2n} <= exp((H_n - 1)/2) <= sqrt n`.
pub fn check_zhang_chain(ctx: &Ctx, n: u64) -> Vec<Entry> {
    let inst = format!("n={n}");
    let h = (1..=n).fold(Rat::zero(), |acc, k| acc + rat(1, k as i64));
    let mid = ExactPosReal::exp((h - int(1)) / int(2));
    let left = factorial_exact(n).pow(&rat(1, 2 * n as i64));
    vec![
        ctx.check256("tzhi.chain.left", inst.clone(), real(left), Relation::Le, real(mid.clone()))
            .with_note("Z_i = sqrt i for the standard bundle, used as reference values"),
        ctx.check256("tzhi.chain.right", inst, real(mid), Relation::Le, real(sqrt_int(n))),
    ]
}

fn zhang_instances(ctx: &Ctx) -> Vec<(String, Bundle)> {
    let mut v: Vec<(String, Bundle)> = (1..=12).map(|n| (format!("standard({n})"), Bundle::standard(n))).collect();
    for (n, l) in [(2, 2), (2, 3), (2, 5), (2, 8), (2, 11), (3, 2), (3, 3), (4, 2), (3, 4)] {
        if let Ok(s) = sym_power(&Bundle::standard(n), l, ctx.config.dimension_cap) {
            v.push((format!("sym^{l}(standard({n}))"), s));
        }
    }
    let mut r = random::rng(ctx.config.seed, 2000);
    for k in 0..12 {
        let n = 1 + (k % 12);
        v.push((format!("random split #{k}"), random::mild_split_bundle(&mut r, n)));
    }
    v
}

// ---------------------------------------------------------------------------
// tensor products

pub fn check_an_tensor(ctx: &Ctx, n: usize, m: usize) -> Result<Vec<Entry>> {
    let inst = format!("n={n}, m={m}");
    let a = gallery::root_lattice_an(n)?;
    let e = Bundle::standard(m);
    let t = tensor(&a, &e)?;
    let search_mode = |d: usize| MaxSlopeMode::Search(SearchFamily::coordinate(d));
    let ms_t = max_slope(&t, &search_mode(t.dim()), &ctx.policy)?;
    let ms_a = max_slope(&a, &search_mode(n), &ctx.policy)?;
    let ms_e = max_slope(&e, &search_mode(m), &ctx.policy)?;
    let mu_e = max_slope(&e, &MaxSlopeMode::ExactSplit, &ctx.policy)?.value;
    let mut out = vec![
        ctx.check(
            "prin.an_maxslope",
            inst.clone(),
            slope_q(ms_t.value.clone()),
            Relation::Eq,
            slope_q(slope(&a)?.add(&mu_e)),
        )
        .with_witness(json!({"candidates": ms_t.candidates, "skipped": ms_t.skipped, "certificate": ms_t.certificate}))
        .with_note("search lower bound over coordinate subspaces; none exceeds the slope of A_n"),
        ctx.check(
            "prin.an_mum",
            inst.clone(),
            slope_q(ms_t.value.clone()),
            Relation::Ge,
            slope_q(ms_a.value.add(&ms_e.value)),
        )
        .with_note("both sides are search lower bounds"),
    ];
    out.extend(guard("prin.an_minimum", &inst.clone(), || {
        let s = ctx.search(&t)?;
        // witness as an n x m matrix; a pure tensor has rank 1
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..m).map(|j| Rat::from_integer(s.witness[i * m + j].clone())).collect())
            .collect();
        let pure = RatMatrix::from_rows(rows)?.rank() == 1;
        Ok(vec![
            ctx.check("prin.an_minimum", inst.clone(), exact_height(&s.value)?, Relation::Eq, real(sqrt_int(2)))
                .with_witness(json!({"witness": ints_json(&s.witness), "pure_tensor": pure})),
            ctx.check("prin.an_pure_witness", inst.clone(), Quantity::Count(pure as u64), Relation::Eq, Quantity::Count(1)),
            ctx.conditional(
                "prin.an_lower",
                inst.clone(),
                real(&sqrt_int(2) * &mu_e.neg().into_exp()),
                Relation::Le,
                real(s.value.upper().clone()),
            )
            .with_note("uses Lambda(A_n) = sqrt 2 over all algebraic points"),
        ])
    }));
    Ok(out)
}

pub fn check_tensor(ctx: &Ctx, a: &Bundle, b: &Bundle, label: &str) -> Result<Vec<Entry>> {
    let inst = label.to_string();
    let exact = |x: &Bundle| max_slope(x, &MaxSlopeMode::ExactSplit, &ctx.policy).map(|m| m.value);
    let t = tensor(a, b)?;
    let (mu_a, mu_b, mu_t) = (exact(a)?, exact(b)?, exact(&t)?);
    let (sa, sb, st) = (ctx.search(a)?, ctx.search(b)?, ctx.search(&t)?);
    let lb_t = lambda_lower_bound(&t, &LambdaRoute::TensorFactorization(vec![a.clone(), b.clone()]), &ctx.policy)?;
    let lb = |x: &Bundle| lambda_lower_bound(x, &LambdaRoute::ExactSplitMaxSlope, &ctx.policy);
    let (ua, ub, ut) = (sa.value.upper(), sb.value.upper(), st.value.upper());
    let half_log_dims = log_rat(&int((a.dim() * b.dim()) as i64), &rat(1, 2))?;
    let mut out = vec![
        ctx.check("prin.split.lower", inst.clone(), real(lb_t), Relation::Le, real(ut.clone()))
            .with_witness(ints_json(&st.witness)),
        ctx.check("prin.split.upper", inst.clone(), real(ut.clone()), Relation::Le, real(ua * ub)),
        ctx.check("prin.split.mum_lower", inst.clone(), slope_q(mu_t.clone()), Relation::Ge, slope_q(mu_a.add(&mu_b))),
        ctx.check(
            "prin.split.mum_upper",
            inst.clone(),
            slope_q(mu_t.sub(&mu_a).sub(&mu_b)),
            Relation::Le,
            slope_q(half_log_dims),
        ),
    ];
    // Lambda is pinned down when the lower bound meets the search value
    let pinned = |x: &Bundle, u: &ExactPosReal| -> Result<Option<ExactPosReal>> {
        let l = lb(x)?;
        Ok((compare(&l, u, &ctx.policy) == CompareOutcome::Equal).then(|| u.clone()))
    };
    let (la, lbb, lt) = (pinned(a, ua)?, pinned(b, ub)?, pinned(&t, ut)?);
    match &la {
        Some(la) => out.push(ctx.check(
            "prin.split.prin",
            inst.clone(),
            real(la * &mu_b.neg().into_exp()),
            Relation::Le,
            real(ut.clone()),
        )),
        None => out.push(Entry::undecided("prin.split.prin", inst.clone(), "Lambda(a) not pinned down")),
    }
    match (la, lbb, lt) {
        (Some(la), Some(lb), Some(lt)) => {
            let r = &(&la * &lb) / &lt;
            let h = (1..=b.dim()).fold(Rat::zero(), |acc, k| acc + rat(1, k as i64));
            out.push(ctx.check("prin.split.lamb_lower", inst.clone(), real(r.clone()), Relation::Ge, real(ExactPosReal::one())));
            out.push(ctx.check(
                "prin.split.lamb_upper",
                inst.clone(),
                real(r.clone()),
                Relation::Le,
                real(sqrt_int(b.dim() as u64)),
            ));
            out.push(ctx.check256(
                "prin.split.precis",
                inst,
                real(r),
                Relation::Le,
                real(ExactPosReal::exp((h - int(1)) / int(2))),
            ));
        }
        _ => out.push(Entry::undecided("prin.split.lamb_lower", inst, "minima not pinned down")),
    }
    Ok(out)
}

fn tensor_pairs(ctx: &Ctx) -> Vec<(String, Bundle, Bundle)> {
    let cap = ctx.config.dimension_cap;
    let mut v = vec![
        ("standard(2) x standard(3)".to_string(), Bundle::standard(2), Bundle::standard(3)),
    ];
    if let (Ok(s2), Ok(s3), Ok(t2)) = (
        sym_power(&Bundle::standard(2), 2, cap),
        sym_power(&Bundle::standard(2), 3, cap),
        sym_power(&Bundle::standard(3), 2, cap),
    ) {
        v.push(("sym^2(standard(2)) x sym^3(standard(2))".into(), s2, s3));
        v.push(("sym^2(standard(3)) x standard(2)".into(), t2, Bundle::standard(2)));
    }
    let mut r = random::rng(ctx.config.seed, 3000);
    for k in 0..8 {
        let na = r.gen_range(1..=2);
        let nb = r.gen_range(1..=2);
        let a = random::split_bundle(&mut r, na);
        let b = random::split_bundle(&mut r, nb);
        v.push((format!("random split pair #{k}"), a, b));
    }
    v
}

// ---------------------------------------------------------------------------
// convexity and the product formula

fn square_enclosure(h: &ExactPosReal, bits: u64) -> (Rat, Rat) {
    let e = to_float(&h.pow(&int(2)), bits);
    (e.lo.to_rat(), e.hi.to_rat())
}

/// `H_a(x)^2 + H_b(y)^2 <= H_{a+b}(x, y)^2`.
fn convexity_entry(ctx: &Ctx, inst: &str, ha: Option<&ExactPosReal>, hb: Option<&ExactPosReal>, hs: &ExactPosReal) -> Result<Entry> {
    let id = "convexe.inequality";
    let (ha, hb) = match (ha, hb) {
        (Some(h), None) | (None, Some(h)) => {
            return Ok(ctx.check(id, inst, real(h.clone()), Relation::Le, real(hs.clone())));
        }
        (Some(a), Some(b)) => (a, b),
        (None, None) => return Err(Error::ZeroVector),
    };
    let sq = |h: &ExactPosReal| h.pow(&int(2)).as_rational();
    if let (Some(a2), Some(b2), Some(s2)) = (sq(ha), sq(hb), sq(hs)) {
        return Ok(ctx.check(
            id,
            inst,
            real(ExactPosReal::from_rational(&(a2 + b2))?),
            Relation::Le,
            real(ExactPosReal::from_rational(&s2)?),
        ));
    }
    let mut bits = 256.max(ctx.policy.start_bits);
    loop {
        let (al, ah) = square_enclosure(ha, bits);
        let (bl, bh) = square_enclosure(hb, bits);
        let (sl, sh) = square_enclosure(hs, bits);
        let (lo, hi) = (&al + &bl, &ah + &bh);
        if hi <= sl || lo > sh || bits >= ctx.policy.max_bits {
            return Ok(ctx.check(id, inst, Quantity::enclosure(&lo, &hi), Relation::Le, Quantity::enclosure(&sl, &sh))
                .with_note(format!("squares enclosed at {bits} bits")));
        }
        bits *= 2;
    }
}

pub fn check_convexity(ctx: &Ctx, trials: u64, seed: u64) -> Vec<Entry> {
    (0..trials)
        .into_par_iter()
        .flat_map_iter(|trial| {
            let inst = format!("trial={trial}");
            guard("convexe", &inst.clone(), || {
                let mut r = random::rng(seed, 4000 + trial);
                let na = r.gen_range(1..=2);
                let nb = r.gen_range(1..=2);
                let a = random::split_bundle(&mut r, na);
                let b = random::split_bundle(&mut r, nb);
                let mut x = random::vector(&mut r, na);
                let mut y = random::vector(&mut r, nb);
                match r.gen_range(0..10) {
                    0 => x.iter_mut().for_each(|v| *v = int(0)),
                    1 => y.iter_mut().for_each(|v| *v = int(0)),
                    _ => {}
                }
                let s = direct_sum(&a, &b)?;
                let xy: Vec<Rat> = x.iter().chain(&y).cloned().collect();
                let ex = |h: HeightResult| -> Result<ExactPosReal> {
                    h.exact().cloned().ok_or_else(|| Error::Indeterminate("interval height".into()))
                };
                let nz = |v: &[Rat]| v.iter().any(|c| !c.is_zero());
                let ha = if nz(&x) { Some(ex(height(&a, &x)?)?) } else { None };
                let hb = if nz(&y) { Some(ex(height(&b, &y)?)?) } else { None };
                let hs = ex(height(&s, &xy)?)?;
                let mut out = vec![convexity_entry(ctx, &inst, ha.as_ref(), hb.as_ref(), &hs)?];
                if trial < 50 {
                    out.extend(guard("convexe.min_identity", &inst.clone(), || {
                        let (sa, sb, ss) = (ctx.search(&a)?, ctx.search(&b)?, ctx.search(&s)?);
                        let (ua, ub) = (sa.value.upper(), sb.value.upper());
                        let min = if compare(ua, ub, &ctx.policy) == CompareOutcome::Greater { ub } else { ua };
                        Ok(vec![ctx
                            .check("convexe.min_identity", inst.clone(), real(ss.value.upper().clone()), Relation::Eq, real(min.clone()))
                            .with_witness(ints_json(&ss.witness))])
                    }));
                }
                Ok(out)
            })
        })
        .collect()
}

pub fn check_product_formula(ctx: &Ctx, trials: u64, seed: u64) -> Vec<Entry> {
    let results: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = random::rng(seed, 5000 + trial);
            let n = r.gen_range(1..=3);
            let b = if r.gen_bool(0.5) {
                random::general_bundle(&mut r, n)
            } else {
                random::split_bundle(&mut r, n)
            };
            let x = random::vector(&mut r, n);
            let c = random::nonzero_rat(&mut r);
            let cx: Vec<Rat> = x.iter().map(|v| v * &c).collect();
            Ok(height(&b, &x)? == height(&b, &cx)?)
        })
        .collect();
    let mut good = 0;
    let mut failures = Vec::new();
    let mut errors = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(true) => good += 1,
            Ok(false) => failures.push(i),
            Err(_) => errors += 1,
        }
    }
    let mut e = ctx.check(
        "prodformula",
        format!("trials={trials}"),
        Quantity::Count(good),
        Relation::Eq,
        Quantity::Count(trials),
    )
    .with_note("H(cx) = H(x) as exact height results");
    if !failures.is_empty() || errors > 0 {
        e = e.with_witness(json!({"failing_trials": failures, "errors": errors, "seed": seed}));
    }
    vec![e]
}

// ---------------------------------------------------------------------------

pub const GROUPS: [&str; 11] = [
    "thmppcm", "slopes", "minima", "ce", "mha", "pentesym", "ext", "tzhi", "prin", "convexe", "prodformula",
];

pub fn run_group(ctx: &Ctx, group: &str) -> Vec<Entry> {
    match group {
        "thmppcm" => check_appendix(ctx),
        "slopes" => check_slopes(ctx),
        "minima" => check_minima(ctx),
        "ce" => guard("ce", "q=1/4", || check_counterexample(ctx, &rat(1, 4))),
        "mha" => (2..=6usize)
            .into_par_iter()
            .flat_map_iter(|n| guard("mha", &format!("n={n}"), || check_mh(ctx, n, &rat(1, 100))))
            .collect(),
        "pentesym" => {
            let grid: Vec<(usize, usize)> = (1..=12).flat_map(|n| (1..=12).map(move |l| (n, l))).collect();
            grid.par_iter()
                .flat_map_iter(|&(n, l)| guard("pentesym", &format!("n={n}, l={l}"), || check_sym(ctx, n, l)))
                .collect()
        }
        "ext" => {
            let grid: Vec<(usize, usize)> = (1..=8).flat_map(|n| (1..=n).map(move |l| (n, l))).collect();
            grid.par_iter()
                .flat_map_iter(|&(n, l)| guard("ext", &format!("n={n}, l={l}"), || check_ext(ctx, n, l)))
                .collect()
        }
        "tzhi" => {
            let mut v: Vec<Entry> = zhang_instances(ctx)
                .par_iter()
                .flat_map_iter(|(label, b)| guard("tzhi", label, || check_zhang(ctx, b, label)))
                .collect();
            v.par_extend((1..=1000u64).into_par_iter().flat_map_iter(|n| check_zhang_chain(ctx, n)));
            v
        }
        "prin" => {
            let grid: Vec<(usize, usize)> = (1..=6).flat_map(|n| (1..=6).map(move |m| (n, m))).collect();
            let mut v: Vec<Entry> = grid
                .par_iter()
                .flat_map_iter(|&(n, m)| guard("prin", &format!("n={n}, m={m}"), || check_an_tensor(ctx, n, m)))
                .collect();
            v.par_extend(
                tensor_pairs(ctx)
                    .par_iter()
                    .flat_map_iter(|(label, a, b)| guard("prin.split", label, || check_tensor(ctx, a, b, label))),
            );
            v
        }
        "convexe" => check_convexity(ctx, 500, ctx.config.seed),
        "prodformula" => check_product_formula(ctx, 500, ctx.config.seed),
        other => vec![Entry::undecided(other, "-", "unknown statement group")],
    }
}
