//! Montgomery arithmetic over an odd multi-precision modulus.
//!
//! Values are held as little-endian `u64` limbs internally. The Montgomery
//! radix is `R = 2^k` where `k` is the exact bit length of the modulus, so
//! the reduction runs `L - 1` full-word steps followed by one partial step of
//! `k - 64(L - 1)` bits.
//!
//! Every call to the multiply primitive (`MontP`) is counted. Exponentiation
//! routines count locally and publish the total once per call, so the
//! context counter equals the number of `MontP` invocations made through it.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::bignat::BigNat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MontError {
    #[error("Montgomery modulus must be odd")]
    EvenModulus,
    #[error("Montgomery modulus must be at least 3")]
    ModulusTooSmall,
    #[error("operand is not reduced below the modulus")]
    OutOfRange,
}

/// Precomputed Montgomery context for one odd modulus.
#[derive(Debug)]
pub struct MontCtx {
    modulus: BigNat,
    n: Vec<u64>,
    k: u64,
    /// Bits consumed by the final, partial reduction digit (1..=64).
    top_shift: u32,
    r_mod_n: BigNat,
    r2_mod_n: BigNat,
    r_limbs: Vec<u64>,
    r2_limbs: Vec<u64>,
    n_prime: u64,
    mul_counter: AtomicU64,
}

impl Clone for MontCtx {
    fn clone(&self) -> Self {
        MontCtx {
            modulus: self.modulus.clone(),
            n: self.n.clone(),
            k: self.k,
            top_shift: self.top_shift,
            r_mod_n: self.r_mod_n.clone(),
            r2_mod_n: self.r2_mod_n.clone(),
            r_limbs: self.r_limbs.clone(),
            r2_limbs: self.r2_limbs.clone(),
            n_prime: self.n_prime,
            mul_counter: AtomicU64::new(self.mul_count()),
        }
    }
}

impl PartialEq for MontCtx {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for MontCtx {}

/// `-n0^{-1} mod 2^64` by Newton iteration (each step doubles the correct bits).
fn neg_inv_word(n0: u64) -> u64 {
    debug_assert!(n0 & 1 == 1);
    let mut inv: u64 = 1;
    for _ in 0..6 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(n0.wrapping_mul(inv)));
    }
    inv.wrapping_neg()
}

/// `2^exp mod n` by repeated modular doubling.
fn pow2_mod(n: &BigNat, exp: u64) -> BigNat {
    let mut x = BigNat::one() % n.clone();
    for _ in 0..exp {
        x = &x + &x;
        if x >= *n {
            x = &x - n;
        }
    }
    x
}

#[inline]
fn mac(acc: u64, a: u64, b: u64, carry: u64) -> (u64, u64) {
    let wide = acc as u128 + (a as u128) * (b as u128) + carry as u128;
    (wide as u64, (wide >> 64) as u64)
}

/// Adds `q * n` into `t` starting at word `offset`, propagating the carry.
#[inline]
fn add_scaled(t: &mut [u64], n: &[u64], q: u64, offset: usize) {
    let mut carry = 0u64;
    for (j, &nj) in n.iter().enumerate() {
        let (lo, hi) = mac(t[offset + j], q, nj, carry);
        t[offset + j] = lo;
        carry = hi;
    }
    let mut idx = offset + n.len();
    while carry != 0 {
        let (sum, overflow) = t[idx].overflowing_add(carry);
        t[idx] = sum;
        carry = overflow as u64;
        idx += 1;
    }
}

/// Reusable buffers for the limb-level multiply.
struct Scratch {
    t: Vec<u64>,
    wide: Vec<u64>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        Scratch {
            t: vec![0; 2 * len + 1],
            wide: vec![0; len + 1],
        }
    }
}

impl MontCtx {
    pub fn new(modulus: &BigNat) -> Result<Self, MontError> {
        if !modulus.is_odd() {
            return Err(MontError::EvenModulus);
        }
        if *modulus < BigNat::from_u64(3) {
            return Err(MontError::ModulusTooSmall);
        }
        let k = modulus.bits();
        let len = k.div_ceil(64) as usize;
        let n = modulus.to_limbs(len);
        let top_shift = (k - 64 * (len as u64 - 1)) as u32;
        let r_mod_n = pow2_mod(modulus, k);
        let r2_mod_n = pow2_mod(modulus, 2 * k);
        Ok(MontCtx {
            modulus: modulus.clone(),
            k,
            top_shift,
            r_limbs: r_mod_n.to_limbs(len),
            r2_limbs: r2_mod_n.to_limbs(len),
            r_mod_n,
            r2_mod_n,
            n_prime: neg_inv_word(n[0]),
            n,
            mul_counter: AtomicU64::new(0),
        })
    }

    pub fn modulus(&self) -> &BigNat {
        &self.modulus
    }

    /// Bit length of the modulus; the radix is `R = 2^k`.
    pub fn bit_len(&self) -> u64 {
        self.k
    }

    pub fn r_mod_n(&self) -> &BigNat {
        &self.r_mod_n
    }

    pub fn r2_mod_n(&self) -> &BigNat {
        &self.r2_mod_n
    }

    pub fn n_prime(&self) -> u64 {
        self.n_prime
    }

    /// Total `MontP` invocations made through this context.
    pub fn mul_count(&self) -> u64 {
        self.mul_counter.load(Ordering::Relaxed)
    }

    fn width(&self) -> usize {
        self.n.len()
    }

    fn record(&self, calls: u64) {
        if calls > 0 {
            self.mul_counter.fetch_add(calls, Ordering::Relaxed);
        }
    }

    fn limbs_of(&self, x: &BigNat) -> Result<Vec<u64>, MontError> {
        if *x >= self.modulus {
            return Err(MontError::OutOfRange);
        }
        Ok(x.to_limbs(self.width()))
    }

    fn one_limbs(&self) -> Vec<u64> {
        let mut one = vec![0; self.width()];
        one[0] = 1;
        one
    }

    /// `out = a * b * 2^-k mod n` for `a, b < n`. Does not touch the counter.
    fn montp(&self, a: &[u64], b: &[u64], out: &mut [u64], s: &mut Scratch) {
        let len = self.width();
        let t = &mut s.t;
        t.iter_mut().for_each(|w| *w = 0);

        for (i, &ai) in a.iter().enumerate() {
            let mut carry = 0u64;
            for (j, &bj) in b.iter().enumerate() {
                let (lo, hi) = mac(t[i + j], ai, bj, carry);
                t[i + j] = lo;
                carry = hi;
            }
            t[i + len] = carry;
        }

        for i in 0..len - 1 {
            let q = t[i].wrapping_mul(self.n_prime);
            add_scaled(t, &self.n, q, i);
        }
        let mask = if self.top_shift == 64 {
            u64::MAX
        } else {
            (1u64 << self.top_shift) - 1
        };
        let q = t[len - 1].wrapping_mul(self.n_prime) & mask;
        add_scaled(t, &self.n, q, len - 1);

        // t >> (64 * (len - 1) + top_shift) into `len + 1` words; the value is < 2n.
        let wide = &mut s.wide;
        let base = len - 1;
        if self.top_shift == 64 {
            wide.copy_from_slice(&t[len..=2 * len]);
        } else {
            let sh = self.top_shift;
            for j in 0..=len {
                let lo = t[base + j] >> sh;
                let hi = if base + j + 1 < t.len() {
                    t[base + j + 1] << (64 - sh)
                } else {
                    0
                };
                wide[j] = lo | hi;
            }
        }

        if !self.below_modulus(wide) {
            let mut borrow = 0u64;
            for j in 0..=len {
                let nj = if j < len { self.n[j] } else { 0 };
                let (d1, b1) = wide[j].overflowing_sub(nj);
                let (d2, b2) = d1.overflowing_sub(borrow);
                wide[j] = d2;
                borrow = (b1 | b2) as u64;
            }
        }
        out.copy_from_slice(&wide[..len]);
    }

    fn below_modulus(&self, wide: &[u64]) -> bool {
        let len = self.width();
        if wide[len] != 0 {
            return false;
        }
        for j in (0..len).rev() {
            if wide[j] != self.n[j] {
                return wide[j] < self.n[j];
            }
        }
        false
    }

    /// Maps `x` into the Montgomery domain: `x * R mod n`.
    pub fn to_domain(&self, x: &BigNat) -> Result<BigNat, MontError> {
        let r2 = self.r2_mod_n.clone();
        self.mont_mul(x, &r2)
    }

    /// Maps a domain value back: `x_md * R^-1 mod n`.
    pub fn from_domain(&self, x_md: &BigNat) -> Result<BigNat, MontError> {
        self.mont_mul(x_md, &BigNat::one())
    }

    /// One `MontP`: `a * b * R^-1 mod n`.
    pub fn mont_mul(&self, a: &BigNat, b: &BigNat) -> Result<BigNat, MontError> {
        let a = self.limbs_of(a)?;
        let b = self.limbs_of(b)?;
        let mut s = Scratch::new(self.width());
        let mut out = vec![0; self.width()];
        self.montp(&a, &b, &mut out, &mut s);
        self.record(1);
        Ok(BigNat::from_limbs(&out))
    }

    /// `g^e mod n` by left-to-right binary exponentiation in the domain.
    pub fn mont_exp(&self, g: &BigNat, e: &BigNat) -> Result<BigNat, MontError> {
        self.mont_exp_counted(g, e).map(|(v, _)| v)
    }

    /// Like [`MontCtx::mont_exp`], also returning the `MontP` calls it made.
    pub fn mont_exp_counted(&self, g: &BigNat, e: &BigNat) -> Result<(BigNat, u64), MontError> {
        let g = self.limbs_of(g)?;
        if e.is_zero() {
            return Ok((BigNat::one(), 0));
        }
        let len = self.width();
        let mut s = Scratch::new(len);
        let mut calls = 0u64;

        let mut g_md = vec![0; len];
        self.montp(&g, &self.r2_limbs, &mut g_md, &mut s);
        calls += 1;

        let mut acc = self.r_limbs.clone();
        let mut tmp = vec![0; len];
        for i in (0..e.bits()).rev() {
            self.montp(&acc, &acc, &mut tmp, &mut s);
            std::mem::swap(&mut acc, &mut tmp);
            calls += 1;
            if e.bit(i) {
                self.montp(&acc, &g_md, &mut tmp, &mut s);
                std::mem::swap(&mut acc, &mut tmp);
                calls += 1;
            }
        }

        self.montp(&acc, &self.one_limbs(), &mut tmp, &mut s);
        calls += 1;
        self.record(calls);
        Ok((BigNat::from_limbs(&tmp), calls))
    }

    /// `g0^e0 * g1^e1 mod n` with one shared squaring chain.
    ///
    /// Four precomputations (`g0'`, `g1'`, `g0'g1'` and the domain one), then
    /// one squaring per scanned bit plus one multiply for every bit position
    /// where either exponent is set, then the conversion out of the domain.
    pub fn mont_sim_exp(
        &self,
        g0: &BigNat,
        g1: &BigNat,
        e0: &BigNat,
        e1: &BigNat,
    ) -> Result<BigNat, MontError> {
        self.mont_sim_exp_counted(g0, g1, e0, e1).map(|(v, _)| v)
    }

    pub fn mont_sim_exp_counted(
        &self,
        g0: &BigNat,
        g1: &BigNat,
        e0: &BigNat,
        e1: &BigNat,
    ) -> Result<(BigNat, u64), MontError> {
        let g0 = self.limbs_of(g0)?;
        let g1 = self.limbs_of(g1)?;
        if e0.is_zero() && e1.is_zero() {
            return Ok((BigNat::one(), 0));
        }
        let len = self.width();
        let mut s = Scratch::new(len);
        let one = self.one_limbs();

        let mut g0_md = vec![0; len];
        let mut g1_md = vec![0; len];
        let mut g01_md = vec![0; len];
        let mut acc = vec![0; len];
        self.montp(&g0, &self.r2_limbs, &mut g0_md, &mut s);
        self.montp(&g1, &self.r2_limbs, &mut g1_md, &mut s);
        self.montp(&g0_md, &g1_md, &mut g01_md, &mut s);
        self.montp(&self.r2_limbs, &one, &mut acc, &mut s);
        let mut calls = 4u64;

        let mut tmp = vec![0; len];
        let scan = e0.bits().max(e1.bits());
        for i in (0..scan).rev() {
            self.montp(&acc, &acc, &mut tmp, &mut s);
            std::mem::swap(&mut acc, &mut tmp);
            calls += 1;
            let factor = match (e0.bit(i), e1.bit(i)) {
                (false, false) => None,
                (true, false) => Some(&g0_md),
                (false, true) => Some(&g1_md),
                (true, true) => Some(&g01_md),
            };
            if let Some(f) = factor {
                self.montp(&acc, f, &mut tmp, &mut s);
                std::mem::swap(&mut acc, &mut tmp);
                calls += 1;
            }
        }

        self.montp(&acc, &one, &mut tmp, &mut s);
        calls += 1;
        self.record(calls);
        Ok((BigNat::from_limbs(&tmp), calls))
    }
}
