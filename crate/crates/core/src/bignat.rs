//! Arbitrary-precision natural numbers.
//!
//! `BigNat` is a thin newtype over [`num_bigint::BigUint`] that adds the
//! conversions the rest of the crate needs: little-endian 64-bit limbs for
//! the Montgomery core, fixed-width big-endian bytes for the carrier
//! container, lowercase hex for key files and uniform sampling from any
//! [`RngCore`].

use std::fmt;
use std::ops::{Add, Mul, Rem, Sub};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;

/// Non-negative integer in canonical form (no leading zero limbs).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigNat(BigUint);

impl BigNat {
    pub fn zero() -> Self {
        BigNat(BigUint::zero())
    }

    pub fn one() -> Self {
        BigNat(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        BigNat(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_odd(&self) -> bool {
        self.0.is_odd()
    }

    /// Number of significant bits; zero has bit length 0.
    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    /// Bit `i`, counting from the least significant bit.
    pub fn bit(&self, i: u64) -> bool {
        self.0.bit(i)
    }

    pub fn count_ones(&self) -> u64 {
        self.0.count_ones()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Little-endian 64-bit limbs, exactly `width` long.
    ///
    /// Panics if the value needs more than `width` limbs.
    pub fn to_limbs(&self, width: usize) -> Vec<u64> {
        let mut limbs = self.0.to_u64_digits();
        assert!(limbs.len() <= width, "value wider than {width} limbs");
        limbs.resize(width, 0);
        limbs
    }

    pub fn from_limbs(limbs: &[u64]) -> Self {
        let mut digits = Vec::with_capacity(limbs.len() * 2);
        for &l in limbs {
            digits.push(l as u32);
            digits.push((l >> 32) as u32);
        }
        BigNat(BigUint::new(digits))
    }

    /// Minimal big-endian encoding; zero encodes as a single `0x00`.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        self.0.to_bytes_be()
    }

    /// Big-endian encoding left-padded to exactly `len` bytes, or `None` if
    /// the value does not fit.
    pub fn to_bytes_be_padded(&self, len: usize) -> Option<Vec<u8>> {
        if self.is_zero() {
            return Some(vec![0; len]);
        }
        let raw = self.0.to_bytes_be();
        if raw.len() > len {
            return None;
        }
        let mut out = vec![0; len - raw.len()];
        out.extend_from_slice(&raw);
        Some(out)
    }

    pub fn from_bytes_be(bytes: &[u8]) -> Self {
        BigNat(BigUint::from_bytes_be(bytes))
    }

    /// Lowercase hex without leading zeros ("0" for zero).
    pub fn to_hex(&self) -> String {
        self.0.to_str_radix(16)
    }

    /// Strict inverse of [`BigNat::to_hex`]: lowercase digits only, no
    /// leading zeros, no prefix.
    pub fn from_hex(s: &str) -> Option<Self> {
        if s.is_empty() || (s.len() > 1 && s.starts_with('0')) {
            return None;
        }
        if !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
            return None;
        }
        BigUint::parse_bytes(s.as_bytes(), 16).map(BigNat)
    }

    pub fn gcd(&self, other: &BigNat) -> BigNat {
        BigNat(self.0.gcd(&other.0))
    }

    pub fn lcm(&self, other: &BigNat) -> BigNat {
        BigNat(self.0.lcm(&other.0))
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, other: &BigNat) -> (BigNat, BigNat) {
        let (q, r) = self.0.div_rem(&other.0);
        (BigNat(q), BigNat(r))
    }

    /// Multiplicative inverse modulo `m`, if it exists.
    pub fn mod_inverse(&self, m: &BigNat) -> Option<BigNat> {
        if m.is_one() {
            return Some(BigNat::zero());
        }
        self.0.modinv(&m.0).map(BigNat)
    }

    pub fn checked_sub(&self, other: &BigNat) -> Option<BigNat> {
        if self.0 < other.0 {
            None
        } else {
            Some(BigNat(&self.0 - &other.0))
        }
    }

    /// Uniform sample from `[0, bound)` by rejection over masked 64-bit words.
    ///
    /// Word order and masking are fixed so a given generator state always
    /// yields the same value. Panics if `bound` is zero.
    pub fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigNat) -> BigNat {
        assert!(!bound.is_zero(), "empty sampling range");
        let bits = bound.bits();
        let words = bits.div_ceil(64) as usize;
        let top_bits = bits - 64 * (words as u64 - 1);
        let top_mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
        let mut limbs = vec![0u64; words];
        loop {
            for limb in limbs.iter_mut() {
                *limb = rng.next_u64();
            }
            limbs[words - 1] &= top_mask;
            let candidate = BigNat::from_limbs(&limbs);
            if candidate < *bound {
                return candidate;
            }
        }
    }

    /// Uniform sample with exactly `bits` significant bits (top bit forced).
    pub fn random_bits<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> BigNat {
        assert!(bits > 0);
        let span = BigNat(BigUint::one() << (bits - 1));
        let low = BigNat::random_below(rng, &span);
        BigNat(span.0 + low.0)
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }
}

impl From<BigUint> for BigNat {
    fn from(v: BigUint) -> Self {
        BigNat(v)
    }
}

impl From<BigNat> for BigUint {
    fn from(v: BigNat) -> Self {
        v.0
    }
}

impl From<u64> for BigNat {
    fn from(v: u64) -> Self {
        BigNat::from_u64(v)
    }
}

impl From<u32> for BigNat {
    fn from(v: u32) -> Self {
        BigNat::from_u64(v as u64)
    }
}

impl From<u8> for BigNat {
    fn from(v: u8) -> Self {
        BigNat::from_u64(v as u64)
    }
}

impl fmt::Debug for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigNat({})", self.0)
    }
}

impl fmt::Display for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::LowerHex for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a BigNat> for &'a BigNat {
            type Output = BigNat;
            fn $method(self, rhs: &'a BigNat) -> BigNat {
                BigNat((&self.0).$method(&rhs.0))
            }
        }

        impl $tr<BigNat> for BigNat {
            type Output = BigNat;
            fn $method(self, rhs: BigNat) -> BigNat {
                BigNat(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);
forward_binop!(Rem, rem);

// Natural subtraction panics on underflow; use `checked_sub` when unsure.
forward_binop!(Sub, sub);
