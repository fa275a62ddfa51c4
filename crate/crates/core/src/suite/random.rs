//! Seeded random bundles and vectors for the property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::bundle::{Bundle, Gram, LocalTwist};
use crate::linalg::RatMatrix;
use crate::rational::{int, rat, Rat};

pub fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

const PRIMES: [u32; 4] = [2, 3, 5, 7];
const WEIGHTS: [(i64, i64); 4] = [(1, 1), (1, 2), (1, 3), (2, 3)];

fn small_rat(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(r.gen_range(-num..=num), r.gen_range(1..=den))
}

fn shift(r: &mut ChaCha8Rng) -> Rat {
    rat(r.gen_range(-2..=2), 2)
}

fn twist_primes(r: &mut ChaCha8Rng, max: usize) -> Vec<u32> {
    let k = r.gen_range(0..=max);
    let mut ps = PRIMES.to_vec();
    ps.shuffle(r);
    ps.truncate(k);
    ps
}

/// Diagonal Gram, monomial local matrices.
pub fn split_bundle(r: &mut ChaCha8Rng, n: usize) -> Bundle {
    let gram = Gram::Diagonal((0..n).map(|_| rat(r.gen_range(1..=6), r.gen_range(1..=4))).collect());
    let twists = twist_primes(r, 2)
        .into_iter()
        .map(|p| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(r);
            let mut m = RatMatrix::zeros(n, n);
            for (i, &j) in perm.iter().enumerate() {
                let v = *[1i64, -1, 2, 3, p as i64].choose(r).expect("nonempty");
                m[(i, j)] = int(v);
            }
            let (a, b) = *WEIGHTS.choose(r).expect("nonempty");
            LocalTwist {
                p: p.into(),
                weight: rat(a, b),
                d_left: (0..n).map(|_| shift(r)).collect(),
                m,
                d_right: (0..n).map(|_| shift(r)).collect(),
            }
        })
        .collect();
    Bundle::new(n, gram, twists).expect("valid split bundle")
}

/// Split bundles with mild twists, so that the pruned search stays small in
/// dimension up to 12.
pub fn mild_split_bundle(r: &mut ChaCha8Rng, n: usize) -> Bundle {
    let gram = Gram::Diagonal((0..n).map(|_| int(r.gen_range(1..=3))).collect());
    let twists = twist_primes(r, 1)
        .into_iter()
        .filter(|&p| p <= 3)
        .map(|p| LocalTwist {
            p: p.into(),
            weight: rat(1, 2),
            d_left: (0..n).map(|_| rat(r.gen_range(0..=1), 2)).collect(),
            m: RatMatrix::identity(n),
            d_right: vec![Rat::from_integer(0.into()); n],
        })
        .collect();
    Bundle::new(n, gram, twists).expect("valid split bundle")
}

fn invertible(r: &mut ChaCha8Rng, n: usize, range: i64) -> RatMatrix {
    loop {
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|_| (0..n).map(|_| int(r.gen_range(-range..=range))).collect())
            .collect();
        let m = RatMatrix::from_rows(rows).expect("square");
        if m.rank() == n {
            return m;
        }
    }
}

/// Dense Gram `A^T A + I` and arbitrary invertible local matrices.
pub fn general_bundle(r: &mut ChaCha8Rng, n: usize) -> Bundle {
    let a = invertible(r, n, 2);
    let mut g = a.transpose().mul(&a).expect("square");
    for i in 0..n {
        g[(i, i)] += int(1);
    }
    let twists = twist_primes(r, 2)
        .into_iter()
        .map(|p| {
            let (a, b) = *WEIGHTS.choose(r).expect("nonempty");
            LocalTwist {
                p: p.into(),
                weight: rat(a, b),
                d_left: (0..n).map(|_| shift(r)).collect(),
                m: invertible(r, n, 3),
                d_right: (0..n).map(|_| shift(r)).collect(),
            }
        })
        .collect();
    Bundle::new(n, Gram::from_matrix(g), twists).expect("valid bundle")
}

/// A nonzero rational vector.
pub fn vector(r: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
    loop {
        let v: Vec<Rat> = (0..n)
            .map(|_| if r.gen_bool(0.2) { int(0) } else { small_rat(r, 4, 3) })
            .collect();
        if v.iter().any(|x| *x != int(0)) {
            return v;
        }
    }
}

pub fn nonzero_rat(r: &mut ChaCha8Rng) -> Rat {
    loop {
        let q = small_rat(r, 30, 12);
        if q != int(0) {
            return q;
        }
    }
}
