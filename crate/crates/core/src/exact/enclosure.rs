//! Rigorous binary enclosures of logarithms and exponentials.
//!
//! Everything is fixed point: an interval `[lo, hi]` at scale `w` stands for
//! `[lo / 2^w, hi / 2^w]`. Each primitive rounds outward so the true value is
//! always inside.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactPosReal;
use crate::rational::Rat;

/// `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Self { mant, exp }
    }

    pub fn to_rat(&self) -> Rat {
        let m = Rat::from_integer(self.mant.clone());
        if self.exp >= 0 {
            m * Rat::from_integer(BigInt::one() << self.exp as usize)
        } else {
            m / Rat::from_integer(BigInt::one() << (-self.exp) as usize)
        }
    }

    fn to_f64_near(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.mant >> shift as usize).to_f64().unwrap();
        scale2(top, self.exp + shift)
    }

    /// A double no larger than the value.
    pub fn to_f64_down(&self) -> f64 {
        let f = self.to_f64_near();
        if Rat::from_float(f).is_some_and(|r| r <= self.to_rat()) {
            f
        } else {
            f.next_down()
        }
    }

    /// A double no smaller than the value.
    pub fn to_f64_up(&self) -> f64 {
        let f = self.to_f64_near();
        if Rat::from_float(f).is_some_and(|r| r >= self.to_rat()) {
            f
        } else {
            f.next_up()
        }
    }
}

fn scale2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64_near())
    }
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Enclosure {
    pub fn point(d: Dyadic) -> Self {
        Self {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        match Rat::from_float(x) {
            Some(r) => self.lo.to_rat() <= r && r <= self.hi.to_rat(),
            None => false,
        }
    }

    pub fn contains(&self, other: &Enclosure) -> bool {
        self.lo.to_rat() <= other.lo.to_rat() && other.hi.to_rat() <= self.hi.to_rat()
    }

    /// `(hi - lo) / lo`, exactly.
    pub fn relative_width(&self) -> Rat {
        let lo = self.lo.to_rat();
        (self.hi.to_rat() - &lo) / lo
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_down()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_up()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Fx {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Fx {
    fn add(&mut self, o: &Fx) {
        self.lo += &o.lo;
        self.hi += &o.hi;
    }

    fn scale(&self, r: &Rat) -> Fx {
        let (a, b) = (r.numer(), r.denom());
        if a.is_negative() {
            Fx {
                lo: (&self.hi * a).div_floor(b),
                hi: (&self.lo * a).div_ceil(b),
            }
        } else {
            Fx {
                lo: (&self.lo * a).div_floor(b),
                hi: (&self.hi * a).div_ceil(b),
            }
        }
    }
}

/// `atanh(num/den)` at scale `w`, for `0 <= num/den <= 1/3`.
fn atanh_fx(num: &BigInt, den: &BigInt, w: u64) -> Fx {
    let n2 = num * num;
    let d2 = den * den;
    // t_j approximates z^(2j+1) 2^w from below, with error at most j+1.
    let mut t = (num << w as usize).div_floor(den);
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut j: u64 = 0;
    while !t.is_zero() {
        let k = BigInt::from(2 * j + 1);
        lo += t.div_floor(&k);
        hi += (&t + BigInt::from(j + 1)).div_ceil(&k);
        t = (&t * &n2).div_floor(&d2);
        j += 1;
    }
    // tail: T_J <= J+1 and the ratio is at most 1/9
    hi += BigInt::from(2 * (j + 1));
    Fx { lo, hi }
}

static LN_CACHE: Mutex<Option<HashMap<(BigUint, u64), Fx>>> = Mutex::new(None);

pub(crate) fn ln2_fx(w: u64) -> Fx {
    ln_prime_fx(&BigUint::from(2u32), w)
}

/// `ln p` at scale `w` for an integer `p >= 2`.
pub(crate) fn ln_prime_fx(p: &BigUint, w: u64) -> Fx {
    let key = (p.clone(), w);
    if let Some(hit) = LN_CACHE
        .lock()
        .unwrap()
        .as_ref()
        .and_then(|m| m.get(&key).cloned())
    {
        return hit;
    }
    let fx = if *p == BigUint::from(2u32) {
        let a = atanh_fx(&BigInt::one(), &BigInt::from(3), w);
        Fx {
            lo: a.lo * 2,
            hi: a.hi * 2,
        }
    } else {
        let k = p.bits() - 1;
        let pk = BigInt::one() << k as usize;
        let pi = BigInt::from_biguint(Sign::Plus, p.clone());
        let a = atanh_fx(&(&pi - &pk), &(&pi + &pk), w);
        let l2 = ln2_fx(w);
        let k = BigInt::from(k);
        Fx {
            lo: &l2.lo * &k + a.lo * 2,
            hi: &l2.hi * &k + a.hi * 2,
        }
    };
    LN_CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, fx.clone());
    fx
}

pub(crate) fn log_fx(x: &ExactPosReal, w: u64) -> Fx {
    let e = x.e_coeff();
    let mut acc = Fx {
        lo: (e.numer() << w as usize).div_floor(e.denom()),
        hi: (e.numer() << w as usize).div_ceil(e.denom()),
    };
    for (p, r) in x.prime_logs() {
        acc.add(&ln_prime_fx(p, w).scale(r));
    }
    acc
}

/// Enclosure of the natural logarithm at `w` fractional bits.
pub fn log_enclosure(x: &ExactPosReal, w: u64) -> Enclosure {
    let fx = log_fx(x, w);
    Enclosure {
        lo: Dyadic::new(fx.lo, -(w as i64)),
        hi: Dyadic::new(fx.hi, -(w as i64)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Down,
    Up,
}

/// `exp(r)` at scale `w` for `0 <= r < 2`, rounded in direction `dir`.
fn exp_taylor(r: &BigInt, w: u64, dir: Dir) -> BigInt {
    let one = BigInt::one() << w as usize;
    let mut u = one.clone();
    let mut s = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        s += &u;
        j += 1;
        let den = &one * BigInt::from(j);
        u = match dir {
            Dir::Down => (&u * r).div_floor(&den),
            Dir::Up => (&u * r).div_ceil(&den),
        };
        if u.is_zero() {
            return s;
        }
        if dir == Dir::Up && u <= BigInt::one() && j >= 3 {
            // remaining terms sum to at most twice the current one
            return s + u * 2;
        }
    }
}

fn exp_small(r: &BigInt, w: u64, dir: Dir) -> BigInt {
    if !r.is_negative() {
        return exp_taylor(r, w, dir);
    }
    let sq = BigInt::one() << (2 * w) as usize;
    let neg = -r;
    match dir {
        Dir::Down => sq.div_floor(&exp_taylor(&neg, w, Dir::Up)),
        Dir::Up => sq.div_ceil(&exp_taylor(&neg, w, Dir::Down)),
    }
}

/// Bound on `exp(x / 2^w)` in direction `dir`.
fn exp_bound(x: &BigInt, w: u64, l2: &Fx, dir: Dir) -> Dyadic {
    let k = x.div_floor(&l2.lo);
    let r = match (dir, k.is_negative()) {
        (Dir::Down, false) => x - &k * &l2.hi,
        (Dir::Down, true) => x - &k * &l2.lo,
        (Dir::Up, false) => x - &k * &l2.lo,
        (Dir::Up, true) => x - &k * &l2.hi,
    };
    let mant = exp_small(&r, w, dir);
    let k = k.to_i64().expect("exponent out of range");
    Dyadic::new(mant, k - w as i64)
}

/// Rigorous enclosure of `exp` of the fixed-point interval.
pub(crate) fn exp_fx(x: &Fx, w: u64) -> Enclosure {
    let l2 = ln2_fx(w);
    Enclosure {
        lo: exp_bound(&x.lo, w, &l2, Dir::Down),
        hi: exp_bound(&x.hi, w, &l2, Dir::Up),
    }
}

/// Index and unit exponent of the grid point at or below `d`, on the grid with
/// `sig` significant bits in the binade of `d`.
fn grid_floor(d: &Dyadic, sig: u64) -> (BigInt, i64) {
    let bits = d.mant.bits() as i64;
    let shift = bits - sig as i64;
    if shift >= 0 {
        (&d.mant >> shift as usize, d.exp + shift)
    } else {
        (&d.mant << (-shift) as usize, d.exp + shift)
    }
}

fn grid_ceil(d: &Dyadic, sig: u64) -> (BigInt, i64) {
    let (g, e) = grid_floor(d, sig);
    let back = Dyadic::new(g.clone(), e);
    if back.to_rat() == d.to_rat() {
        (g, e)
    } else {
        (g + 1, e)
    }
}

fn binade(d: &Dyadic) -> i64 {
    d.mant.bits() as i64 - 1 + d.exp
}

/// Enclosure of the value with relative width at most `2^(1 - bits)`.
///
/// Endpoints lie on the grid of `bits + 3` significant bits in the value's
/// binade (exact dyadic values are returned as points), so enclosures at
/// increasing precision are nested.
pub fn to_float(x: &ExactPosReal, bits: u64) -> Enclosure {
    let bits = bits.max(32);
    let sig = bits + 3;
    if let Some(r) = x.as_rational() {
        return rational_enclosure(&r, sig);
    }
    let terms = 1 + x.prime_logs().len() as u64;
    let size = x.ln_f64().abs().max(1.0).log2().ceil() as u64;
    let mut w = sig + 2 * size + 16 + 4 * (64 - terms.leading_zeros() as u64);
    let cap = (64 * sig).max(1 << 16);
    loop {
        let enc = exp_fx(&log_fx(x, w), w);
        if binade(&enc.lo) == binade(&enc.hi) {
            let (gl, e) = grid_floor(&enc.lo, sig);
            let (gh, _) = grid_floor(&enc.hi, sig);
            if gl == gh {
                return Enclosure {
                    lo: Dyadic::new(gl.clone(), e),
                    hi: Dyadic::new(gl + 1, e),
                };
            }
        }
        if w >= cap {
            let (gl, el) = grid_floor(&enc.lo, sig);
            let (gh, eh) = grid_ceil(&enc.hi, sig);
            return Enclosure {
                lo: Dyadic::new(gl, el),
                hi: Dyadic::new(gh, eh),
            };
        }
        w *= 2;
    }
}

fn rational_enclosure(r: &Rat, sig: u64) -> Enclosure {
    let (num, den) = (r.numer(), r.denom());
    if den.is_one() || (den & (den - BigInt::one())).is_zero() {
        let tz = den.bits() as i64 - 1;
        return Enclosure::point(Dyadic::new(num.clone(), -tz));
    }
    // binade: 2^E <= r < 2^(E+1)
    let mut e = num.bits() as i64 - den.bits() as i64;
    let pow2 = |k: i64| -> Rat {
        if k >= 0 {
            Rat::from_integer(BigInt::one() << k as usize)
        } else {
            Rat::new(BigInt::one(), BigInt::one() << (-k) as usize)
        }
    };
    while pow2(e) > *r {
        e -= 1;
    }
    while pow2(e + 1) <= *r {
        e += 1;
    }
    let unit = e - sig as i64 + 1;
    let g = (r / pow2(unit)).floor().to_integer();
    Enclosure {
        lo: Dyadic::new(g.clone(), unit),
        hi: Dyadic::new(g + 1, unit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn ln2_brackets_known_digits() {
        let fx = ln2_fx(200);
        let lo = Rat::new(fx.lo, BigInt::one() << 200);
        let hi = Rat::new(fx.hi, BigInt::one() << 200);
        // ln 2 = 0.693147180559945309417232121458176568...
        let lo_ref = Rat::new(
            "693147180559945309417232121458176568".parse().unwrap(),
            num_traits::pow(BigInt::from(10), 36),
        );
        let hi_ref = lo_ref.clone() + Rat::new(BigInt::one(), num_traits::pow(BigInt::from(10), 36));
        assert!(lo <= hi_ref && lo_ref <= hi, "{lo} {hi}");
        assert!(&hi - &lo < Rat::new(BigInt::from(1000), BigInt::one() << 200));
    }

    #[test]
    fn ln_of_prime_powers_consistent() {
        // ln 5 and ln 7 against f64
        for p in [3u32, 5, 7, 11, 1_000_003] {
            let fx = ln_prime_fx(&BigUint::from(p), 80);
            let lo = Dyadic::new(fx.lo, -80).to_f64_down();
            let hi = Dyadic::new(fx.hi, -80).to_f64_up();
            let want = (p as f64).ln();
            assert!(lo <= want + 1e-15 && want - 1e-15 <= hi);
        }
    }

    #[test]
    fn to_float_examples() {
        let two = ExactPosReal::from_int(2);
        let enc = to_float(&two, 64);
        assert_eq!(enc.lo.to_rat(), int(2));
        assert_eq!(enc.hi.to_rat(), int(2));

        let sqrt2 = two.sqrt();
        let enc = to_float(&sqrt2, 64);
        assert!(enc.contains_f64(1.4142135623730951) || enc.lo_f64() <= 1.4142135623730951);
        let lo = enc.lo.to_rat();
        let hi = enc.hi.to_rat();
        assert!(&lo * &lo < int(2) && int(2) < &hi * &hi);
        assert!(enc.relative_width() <= Rat::new(BigInt::one(), BigInt::one() << 63));

        let e = ExactPosReal::exp(int(1));
        let enc = to_float(&e, 64);
        assert!(enc.lo_f64() <= std::f64::consts::E && std::f64::consts::E <= enc.hi_f64());
        assert!(enc.relative_width() <= Rat::new(BigInt::one(), BigInt::one() << 63));
    }

    #[test]
    fn to_float_rational_non_dyadic() {
        let third = ExactPosReal::from_rational(&rat(1, 3)).unwrap();
        let enc = to_float(&third, 40);
        assert!(enc.lo.to_rat() < rat(1, 3) && rat(1, 3) < enc.hi.to_rat());
        let finer = to_float(&third, 80);
        assert!(enc.contains(&finer));
    }

    #[test]
    fn exp_of_negative_and_large() {
        for (num, den) in [(-5i64, 2i64), (40, 3), (-100, 1), (1, 1000)] {
            let x = ExactPosReal::exp(rat(num, den));
            let enc = to_float(&x, 64);
            let want = (num as f64 / den as f64).exp();
            assert!(enc.lo_f64() <= want * (1.0 + 1e-14));
            assert!(enc.hi_f64() >= want * (1.0 - 1e-14));
        }
    }
}
