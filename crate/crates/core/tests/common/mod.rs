//! Reference implementations used as test oracles. Nothing here touches the
//! Montgomery code paths.

#![allow(dead_code)]

use hestego::{BigNat, GrayImage, SplitMix64};
use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// Plain left-to-right square-and-multiply with `%` after every step.
pub fn naive_modpow(base: &BigUint, exp: &BigUint, n: &BigUint) -> BigUint {
    let mut acc = BigUint::one() % n;
    let base = base % n;
    for i in (0..exp.bits()).rev() {
        acc = &acc * &acc % n;
        if exp.bit(i) {
            acc = &acc * &base % n;
        }
    }
    acc
}

/// `a · b · 2^-k mod n` for `k = bitlen(n)`.
pub fn naive_mont_mul(a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
    let r = BigUint::one() << n.bits();
    let r_inv = (r % n).modinv(n).expect("n odd");
    a * b % n * r_inv % n
}

pub fn random_big(rng: &mut SplitMix64, bits: u64) -> BigUint {
    let words = bits.div_ceil(64) as usize;
    let mut v = BigUint::zero();
    for _ in 0..words {
        v = (v << 64) + BigUint::from(rng.next());
    }
    v & ((BigUint::one() << bits) - 1u32)
}

pub fn random_below(rng: &mut SplitMix64, n: &BigUint) -> BigUint {
    loop {
        let v = random_big(rng, n.bits());
        if &v < n {
            return v;
        }
    }
}

/// Random odd modulus with exactly `bits` bits.
pub fn random_odd_modulus(rng: &mut SplitMix64, bits: u64) -> BigUint {
    let top = BigUint::one() << (bits - 1);
    let v = random_big(rng, bits) | top | BigUint::one();
    if v.bits() < 2 || v == BigUint::one() { big(3) } else { v }
}

pub fn nat(v: &BigUint) -> BigNat {
    BigNat::from(v.clone())
}

pub fn uint(v: &BigNat) -> BigUint {
    v.as_biguint().clone()
}

/// Synthetic grayscale cover: a diagonal gradient with a noisy texture and a
/// bright disc, covering the full 0..=255 range.
pub fn synthetic_cover(side: u32, seed: u64) -> GrayImage {
    let mut rng = SplitMix64::new(seed);
    let c = side as i64 / 2;
    let samples = (0..side * side)
        .map(|i| {
            let (x, y) = ((i % side) as i64, (i / side) as i64);
            let base = (x + y) * 255 / (2 * side as i64 - 2).max(1);
            let disc = if (x - c).pow(2) + (y - c).pow(2) < (c / 2).pow(2) { 80 } else { 0 };
            let noise = (rng.next() % 21) as i64 - 10;
            (base + disc + noise).clamp(0, 255) as u8
        })
        .collect();
    GrayImage::new(side, side, samples).unwrap()
}

pub fn random_bytes(rng: &mut SplitMix64, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.next() as u8).collect()
}
