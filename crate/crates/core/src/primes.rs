//! Primes, factorization and factorial valuations.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_prime::nt_funcs;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return nt_funcs::is_prime64(small);
    }
    nt_funcs::is_prime(n, None).probably()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    nt_funcs::next_prime(n, None).expect("BigUint never overflows")
}

pub fn primes_upto(m: u64) -> Vec<u64> {
    if m < 2 {
        return Vec::new();
    }
    nt_funcs::primes(m + 1)
        .into_iter()
        .filter(|&p| p <= m)
        .collect()
}

/// Complete factorization of a positive integer.
pub fn factorize(n: &BigUint) -> Result<BTreeMap<BigUint, u64>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    if n.is_one() {
        return Ok(BTreeMap::new());
    }
    if let Some(small) = n.to_u64() {
        return Ok(nt_funcs::factorize64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e as u64))
            .collect());
    }
    let (found, rest) = nt_funcs::factors(n.clone(), None);
    if rest.is_some() {
        return Err(Error::Factorization(n.to_string()));
    }
    Ok(found.into_iter().map(|(p, e)| (p, e as u64)).collect())
}

/// Legendre's formula: v_p(m!) = sum over k of floor(m / p^k).
pub fn legendre(m: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = m;
    while q > 0 {
        q /= p;
        total += q;
    }
    total
}

pub fn factorial(m: u64) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
