use std::hint::black_box;

use adelic_core::bundle::{height, min_search, slope, sym_power, tensor};
use adelic_core::exact::compare;
use adelic_core::gallery::{self, MhOptions};
use adelic_core::multinomial::{p_bruteforce, p_closed_form};
use adelic_core::rational::{int, rat};
use adelic_core::{Bundle, ExactPosReal, PrecisionPolicy};
use criterion::{criterion_group, criterion_main, Criterion};

fn multinomial(c: &mut Criterion) {
    c.bench_function("p_closed_form(6, 30)", |b| b.iter(|| p_closed_form(black_box(6), black_box(30))));
    c.bench_function("p_bruteforce(4, 20)", |b| b.iter(|| p_bruteforce(black_box(4), black_box(20), 1 << 24)));
}

fn exact(c: &mut Criterion) {
    let policy = PrecisionPolicy::default();
    let x = &ExactPosReal::from_int(2).sqrt() * &ExactPosReal::prime_pow(5u32.into(), rat(1, 4));
    let y = ExactPosReal::prime_pow(5u32.into(), rat(1, 2));
    c.bench_function("compare integer route", |b| b.iter(|| compare(black_box(&x), black_box(&y), &policy)));
    let z = ExactPosReal::exp(rat(1, 3));
    c.bench_function("compare numeric route", |b| b.iter(|| compare(black_box(&x), black_box(&z), &policy)));
}

fn bundles(c: &mut Criterion) {
    let policy = PrecisionPolicy::default();
    let e = gallery::counterexample_eq(&rat(1, 4), &policy).unwrap();
    let t = tensor(&e, &e).unwrap();
    let v = [int(1), int(0), int(0), int(-1)];
    c.bench_function("height on E_q tensor E_q", |b| b.iter(|| height(black_box(&t), &v)));
    let s = sym_power(&Bundle::standard(4), 4, 5000).unwrap();
    c.bench_function("slope of sym^4 standard(4)", |b| b.iter(|| slope(black_box(&s))));
    let a6 = gallery::root_lattice_an(6).unwrap();
    c.bench_function("min_search A_6", |b| b.iter(|| min_search(black_box(&a6), 3, 4)));
    c.bench_function("mh_construct n=4", |b| {
        b.iter(|| gallery::mh_construct(black_box(4), &rat(1, 100), &MhOptions::default()))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = multinomial, exact, bundles
}
criterion_main!(benches);
