//! Prime generation for key material.

use num_bigint::BigUint;
use rand::RngCore;

use crate::bignat::BigNat;

const MR_ROUNDS: usize = 40;

const SMALL_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primality test: trial division up to 16 bits, Miller-Rabin with 40
/// random bases above that.
pub fn is_probable_prime<R: RngCore + ?Sized>(n: &BigNat, rng: &mut R) -> bool {
    if n.bits() <= 16 {
        return is_prime_trial(n.to_u64().unwrap_or(0));
    }
    if !n.is_odd() {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if (n % &BigNat::from_u64(p)).is_zero() {
            return false;
        }
    }

    let n_big = n.as_biguint();
    let one = BigUint::from(1u32);
    let n_minus_1 = n_big - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let span = BigNat::from(n_big - 3u32);

    'witness: for _ in 0..MR_ROUNDS {
        let a = BigNat::random_below(rng, &span).into_biguint() + 2u32;
        let mut x = a.modpow(&d, n_big);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n_big);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits and its two top bits set, so the
/// product of two such primes has full length. `None` once `budget`
/// candidates have been rejected.
pub fn random_prime<R: RngCore + ?Sized>(bits: u64, budget: usize, rng: &mut R) -> Option<BigNat> {
    assert!(bits >= 3);
    let top = BigNat::from(BigUint::from(3u32) << (bits - 2));
    let span = BigNat::from(BigUint::from(1u32) << (bits - 2));
    for _ in 0..budget {
        let mut candidate = &top + &BigNat::random_below(rng, &span);
        if !candidate.is_odd() {
            candidate = &candidate + &BigNat::one();
            if candidate.bits() > bits {
                continue;
            }
        }
        if is_probable_prime(&candidate, rng) {
            return Some(candidate);
        }
    }
    None
}
