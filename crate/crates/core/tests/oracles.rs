//! Reference values, computed independently in the test where possible.

use adelic_core::bundle::{
    dual, ext_power, height, max_slope, min_search, slope, sym_power, tensor, MaxSlopeMode,
};
use adelic_core::gallery::{self, MhOptions};
use adelic_core::multinomial::{lcm_upto, p_bruteforce, p_closed_form};
use adelic_core::rational::{int, rat};
use adelic_core::suite::{check_counterexample, Ctx, Verdict};
use adelic_core::{Bundle, Config, ExactPosReal, PrecisionPolicy, SlopeValue};
use num_bigint::BigUint;

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// lcm of all multinomials l!/(i_1!...i_n!) by naive recursion in u128.
fn naive_p(n: usize, l: u32) -> u128 {
    fn rec(k: usize, n: usize, left: u32, l: u32, den: u128, acc: &mut u128) {
        let f = |m: u32| (1..=m as u128).product::<u128>();
        if k + 1 == n {
            let m = f(l) / (den * f(left));
            *acc = *acc / gcd(*acc, m) * m;
            return;
        }
        for x in 0..=left {
            rec(k + 1, n, left - x, l, den * f(x), acc);
        }
    }
    let mut acc = 1;
    rec(0, n, l, l, 1, &mut acc);
    acc
}

#[test]
fn p_matches_naive_lcm() {
    for n in 1..=5usize {
        for l in 1..=14u32 {
            let want = BigUint::from(naive_p(n, l));
            assert_eq!(p_bruteforce(n as u64, l as u64, 1 << 30).unwrap().value, want, "n={n} l={l}");
            assert_eq!(p_closed_form(n as u64, l as u64).unwrap(), want, "n={n} l={l}");
        }
    }
}

#[test]
fn small_p_values() {
    assert_eq!(p_closed_form(2, 4).unwrap(), BigUint::from(12u32));
    assert_eq!(p_closed_form(1, 100).unwrap(), BigUint::from(1u32));
    assert_eq!(p_closed_form(3, 2).unwrap(), BigUint::from(2u32));
    assert_eq!(p_closed_form(3, 3).unwrap(), BigUint::from(6u32));
    assert_eq!(lcm_upto(10).unwrap(), BigUint::from(2520u32));
}

#[test]
fn counterexample_values() {
    let policy = PrecisionPolicy::default();
    let e = gallery::counterexample_eq(&rat(1, 4), &policy).unwrap();
    let s = slope(&e).unwrap();
    assert_eq!(
        serde_json::to_string(&s.exp()).unwrap(),
        r#"{"e":"0","logs":{"5":"-1/8"}}"#
    );
    let t = tensor(&e, &e).unwrap();
    let h = height(&t, &[int(1), int(0), int(0), int(-1)]).unwrap();
    assert_eq!(
        serde_json::to_string(h.exact().unwrap()).unwrap(),
        r#"{"e":"0","logs":{"2":"1/2","5":"1/4"}}"#
    );
    // (1,1): the max-rule product is sqrt 2 * 5^(1/8) > sqrt 2
    let h11 = height(&e, &[int(1), int(1)]).unwrap();
    let want = &ExactPosReal::from_int(2).sqrt() * &ExactPosReal::prime_pow(5u32.into(), rat(1, 8));
    assert_eq!(h11.exact(), Some(&want));
    // 5^(2/5) < 2 since 25 < 32
    assert!(gallery::counterexample_eq(&rat(1, 5), &policy).is_err());

    let ctx = Ctx::new(&Config::default());
    let entries = check_counterexample(&ctx, &rat(1, 4)).unwrap();
    assert!(entries.iter().all(|e| !matches!(e.verdict, Verdict::Violated | Verdict::Undecided)));
    let strict = entries.iter().find(|e| e.statement_id == "ce.strict").unwrap();
    assert_eq!(strict.verdict, Verdict::Holds);
}

#[test]
fn root_lattice_minimum_and_wedges() {
    let a3 = gallery::root_lattice_an(3).unwrap();
    let s = min_search(&a3, 2, 4).unwrap();
    assert_eq!(s.value.exact(), Some(&ExactPosReal::from_int(2).sqrt()));
    let w = ext_power(&a3, 2, 5000).unwrap();
    let s = min_search(&w, 2, 1).unwrap();
    assert_eq!(s.value.exact(), Some(&ExactPosReal::from_int(3).sqrt()));
    // the top wedge of A_n is a line of slope -(1/2) log(n+1)
    for n in 1..=6usize {
        let a = gallery::root_lattice_an(n).unwrap();
        let top = ext_power(&a, n, 5000).unwrap();
        assert_eq!(slope(&top).unwrap(), SlopeValue::log_rational(&int(n as i64 + 1), &rat(-1, 2)).unwrap());
    }
}

#[test]
fn symmetric_power_maximal_slopes() {
    let policy = PrecisionPolicy::default();
    let mu = |n: usize, l: usize| {
        let s = sym_power(&Bundle::standard(n), l, 5000).unwrap();
        max_slope(&s, &MaxSlopeMode::ExactSplit, &policy).unwrap().value
    };
    assert_eq!(mu(2, 3), SlopeValue::log_rational(&int(3), &rat(1, 2)).unwrap());
    assert_eq!(mu(3, 3), SlopeValue::log_rational(&int(6), &rat(1, 2)).unwrap());
    assert_eq!(mu(1, 7), SlopeValue::zero());
    let e4 = ext_power(&Bundle::standard(4), 2, 5000).unwrap();
    assert_eq!(max_slope(&e4, &MaxSlopeMode::ExactSplit, &policy).unwrap().value, SlopeValue::zero());
}

#[test]
fn dual_of_counterexample_has_opposite_slope() {
    let policy = PrecisionPolicy::default();
    let e = gallery::counterexample_eq(&rat(1, 3), &policy).unwrap();
    assert_eq!(slope(&dual(&e).unwrap()).unwrap(), slope(&e).unwrap().neg());
}

#[test]
fn mh_bundle_for_two() {
    let (b, cert) = gallery::mh_construct(2, &rat(1, 100), &MhOptions::default()).unwrap();
    // (i+j)!! for i, j in {1, 2}
    assert_eq!(cert.max_minor, 8u32.into());
    assert_eq!(cert.p, 11u32.into());
    let h = height(&b, &[int(1), int(0)]).unwrap();
    assert!(h.exact().unwrap().is_one());
}

#[test]
fn gallery_round_trip() {
    let policy = PrecisionPolicy::default();
    let bundles = vec![
        gallery::standard(3).unwrap(),
        gallery::root_lattice_an(4).unwrap(),
        gallery::counterexample_eq(&rat(1, 4), &policy).unwrap(),
        gallery::mh_construct(3, &rat(1, 100), &MhOptions::default()).unwrap().0,
    ];
    for b in bundles {
        let js = b.to_json();
        let back = Bundle::from_json(&js).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json(), js);
    }
}
