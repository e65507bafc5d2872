//! Separable embedding of secret bits into Paillier-encrypted pixels.
//!
//! Each cover pixel `p` is split into `m1 + m2 = p` and both halves are
//! encrypted. The secret bit is carried by the order of the two ciphertexts
//! (`first > second` means 1), so anyone holding the hiding key can read it
//! back without decrypting. The private-key holder recovers `p` as
//! `D(E(m1) · E(m2))`, which does not depend on the order.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use thiserror::Error;

use crate::bignat::BigNat;
use crate::paillier::{Ciphertext, PaillierError, PrivateKey, PublicKey};
use crate::rng::SplitMix64;

/// Width of the big-endian bit-length prefix in a framed payload.
pub const FRAME_HEADER_BITS: usize = 32;

const TIE_RETRIES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StegoError {
    #[error("sample count {samples} does not match {width}x{height}")]
    DimensionMismatch { width: u32, height: u32, samples: usize },
    #[error("framed payload needs {needed} bits but the cover holds {capacity}")]
    PayloadTooLarge { needed: usize, capacity: usize },
    #[error("public modulus must exceed 255 to hold a pixel")]
    ModulusTooSmall,
    #[error("malformed payload frame: {0}")]
    MalformedFrame(&'static str),
    #[error("ciphertext pair {index} is tied")]
    TiedPair { index: usize },
    #[error("private key modulus does not match the carrier")]
    KeyMismatch,
    #[error("pixel {index} decrypted to {value}, outside 0..=255")]
    PixelOutOfRange { index: usize, value: BigNat },
    #[error("could not draw distinct ciphertexts for pixel {index}")]
    TieRetriesExhausted { index: usize },
    #[error("carrier holds {pairs} pairs for a {width}x{height} cover")]
    LengthMismatch { width: u32, height: u32, pairs: usize },
    #[error("carrier ciphertext is not in (0, n^2)")]
    CiphertextOutOfRange,
    #[error("hiding key must be exactly 16 hex digits")]
    InvalidHidingKey,
    #[error(transparent)]
    Paillier(#[from] PaillierError),
}

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self, StegoError> {
        if samples.len() as u64 != width as u64 * height as u64 {
            return Err(StegoError::DimensionMismatch {
                width,
                height,
                samples: samples.len(),
            });
        }
        Ok(GrayImage { width, height, samples })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.samples.len()
    }

    /// Embedding capacity in bits: one per pixel.
    pub fn capacity_bits(&self) -> usize {
        self.samples.len()
    }
}

/// Ordered pair of ciphertexts standing in for one cover pixel.
pub type CipherPair = (Ciphertext, Ciphertext);

/// The encrypted carrier: one ciphertext pair per cover pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoImage {
    width: u32,
    height: u32,
    n: BigNat,
    pairs: Vec<CipherPair>,
}

impl StegoImage {
    /// Checks the pair count and that every ciphertext lies in `(0, n²)`.
    /// Tied pairs are accepted here and reported by [`extract`].
    pub fn new(width: u32, height: u32, n: BigNat, pairs: Vec<CipherPair>) -> Result<Self, StegoError> {
        if pairs.len() as u64 != width as u64 * height as u64 {
            return Err(StegoError::LengthMismatch {
                width,
                height,
                pairs: pairs.len(),
            });
        }
        let n_sq = &n * &n;
        let in_range = |c: &Ciphertext| !c.value().is_zero() && *c.value() < n_sq;
        if !pairs.iter().all(|(a, b)| in_range(a) && in_range(b)) {
            return Err(StegoError::CiphertextOutOfRange);
        }
        Ok(StegoImage { width, height, n, pairs })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Public modulus the carrier was encrypted under.
    pub fn n(&self) -> &BigNat {
        &self.n
    }

    pub fn pairs(&self) -> &[CipherPair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<CipherPair> {
        self.pairs
    }
}

/// Shared secret selecting the pixel traversal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HidingKey(pub u64);

impl FromStr for HidingKey {
    type Err = StegoError;

    /// Exactly 16 hex digits, either case.
    fn from_str(s: &str) -> Result<Self, StegoError> {
        if s.len() != 16 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(StegoError::InvalidHidingKey);
        }
        u64::from_str_radix(s, 16)
            .map(HidingKey)
            .map_err(|_| StegoError::InvalidHidingKey)
    }
}

impl fmt::Display for HidingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016X}", self.0)
    }
}

/// Secret message with bit granularity. Bits are packed MSB-first; unused
/// low bits of the last byte are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Payload {
    data: Vec<u8>,
    bit_len: usize,
}

impl Payload {
    pub fn from_bytes(data: Vec<u8>) -> Self {
        let bit_len = data.len() * 8;
        Payload { data, bit_len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut data = Vec::new();
        let mut bit_len = 0;
        for bit in bits {
            if bit_len % 8 == 0 {
                data.push(0);
            }
            if bit {
                *data.last_mut().unwrap() |= 0x80 >> (bit_len % 8);
            }
            bit_len += 1;
        }
        Payload { data, bit_len }
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn bit(&self, i: usize) -> bool {
        self.data[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Length of the framed form: header plus data bits.
    pub fn framed_bits(&self) -> usize {
        FRAME_HEADER_BITS + self.bit_len
    }

    /// Bit `i` of the framed stream, or `false` beyond its end (padding).
    fn framed_bit(&self, i: usize) -> bool {
        if i < FRAME_HEADER_BITS {
            (self.bit_len as u32 >> (FRAME_HEADER_BITS - 1 - i)) & 1 == 1
        } else if i < self.framed_bits() {
            self.bit(i - FRAME_HEADER_BITS)
        } else {
            false
        }
    }
}

/// Splits a pixel into `(⌊p/2⌋, p - ⌊p/2⌋)`.
pub fn split_pixel(p: u8) -> (BigNat, BigNat) {
    let m1 = p / 2;
    (BigNat::from(m1), BigNat::from(p - m1))
}

/// Keyed traversal: Fisher-Yates over `0..count` driven by SplitMix64
/// seeded with the hiding key, `j = next() mod (i + 1)` for `i` from
/// `count - 1` down to 1.
pub fn pixel_order(key: HidingKey, count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    let mut rng = SplitMix64::new(key.0);
    for i in (1..count).rev() {
        let j = (rng.next() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    order
}

/// Puts a pair in the order that encodes `bit`: a 1 needs `first > second`,
/// a 0 needs `first < second`.
pub fn apply_swap_rule(first: Ciphertext, second: Ciphertext, bit: bool) -> CipherPair {
    if (bit && first < second) || (!bit && first > second) {
        (second, first)
    } else {
        (first, second)
    }
}

/// Encrypts one pixel as an ordered ciphertext pair carrying `bit`.
pub fn encrypt_pixel<R: RngCore + ?Sized>(
    pk: &PublicKey,
    pixel: u8,
    bit: bool,
    rng: &mut R,
) -> Result<Option<CipherPair>, StegoError> {
    let (m1, m2) = split_pixel(pixel);
    let e1 = pk.encrypt_with(&m1, rng)?;
    for _ in 0..TIE_RETRIES {
        let e2 = pk.encrypt_with(&m2, rng)?;
        if e1 != e2 {
            return Ok(Some(apply_swap_rule(e1, e2, bit)));
        }
    }
    Ok(None)
}

/// Encrypts `cover` under `pk` and hides `payload` in the pair ordering.
///
/// Pixels are visited in [`pixel_order`]; the `i`-th visited pixel carries
/// bit `i` of the framed payload and every pixel past the frame carries 0.
/// Randomizers are drawn from `rng` in visiting order.
pub fn embed<R: RngCore + ?Sized>(
    cover: &GrayImage,
    payload: &Payload,
    pk: &PublicKey,
    key: HidingKey,
    rng: &mut R,
) -> Result<StegoImage, StegoError> {
    if *pk.n() <= BigNat::from_u64(255) {
        return Err(StegoError::ModulusTooSmall);
    }
    let capacity = cover.capacity_bits();
    if payload.framed_bits() > capacity || payload.bit_len() > u32::MAX as usize {
        return Err(StegoError::PayloadTooLarge {
            needed: payload.framed_bits(),
            capacity,
        });
    }

    let mut slots: Vec<Option<CipherPair>> = vec![None; capacity];
    for (i, &index) in pixel_order(key, capacity).iter().enumerate() {
        let pair = encrypt_pixel(pk, cover.samples[index], payload.framed_bit(i), rng)?
            .ok_or(StegoError::TieRetriesExhausted { index })?;
        slots[index] = Some(pair);
    }
    let pairs = slots.into_iter().map(|p| p.expect("permutation covers every pixel")).collect();
    Ok(StegoImage {
        width: cover.width,
        height: cover.height,
        n: pk.n().clone(),
        pairs,
    })
}

/// Reads the hidden payload back using only the hiding key.
///
/// The frame is rejected if its declared length exceeds the capacity or if
/// any padding pair encodes a 1, which is what a wrong hiding key usually
/// produces.
pub fn extract(stego: &StegoImage, key: HidingKey) -> Result<Payload, StegoError> {
    let capacity = stego.pairs.len();
    if capacity < FRAME_HEADER_BITS {
        return Err(StegoError::MalformedFrame("carrier smaller than the frame header"));
    }
    let order = pixel_order(key, capacity);
    let bit_at = |i: usize| -> Result<bool, StegoError> {
        let index = order[i];
        let (first, second) = &stego.pairs[index];
        if first == second {
            return Err(StegoError::TiedPair { index });
        }
        Ok(first > second)
    };

    let mut declared = 0usize;
    for i in 0..FRAME_HEADER_BITS {
        declared = (declared << 1) | bit_at(i)? as usize;
    }
    if declared > capacity - FRAME_HEADER_BITS {
        return Err(StegoError::MalformedFrame("declared length exceeds capacity"));
    }
    let end = FRAME_HEADER_BITS + declared;
    let payload = Payload::from_bits((FRAME_HEADER_BITS..end).map(bit_at).collect::<Result<Vec<_>, _>>()?);
    for i in end..capacity {
        if bit_at(i)? {
            return Err(StegoError::MalformedFrame("nonzero padding"));
        }
    }
    Ok(payload)
}

/// Recovers the cover with only the private key: each pixel is
/// `D(first · second mod n²)`.
pub fn decrypt_reconstruct(stego: &StegoImage, sk: &PrivateKey) -> Result<GrayImage, StegoError> {
    if sk.n() != stego.n() {
        return Err(StegoError::KeyMismatch);
    }
    let n_sq = &stego.n * &stego.n;
    let samples = stego
        .pairs
        .par_iter()
        .enumerate()
        .map(|(index, (first, second))| {
            let sum = Ciphertext::new(&(first.value() * second.value()) % &n_sq);
            let value = sk.decrypt(&sum)?;
            match value.to_u64() {
                Some(v) if v <= 255 => Ok(v as u8),
                _ => Err(StegoError::PixelOutOfRange { index, value }),
            }
        })
        .collect::<Result<Vec<u8>, StegoError>>()?;
    GrayImage::new(stego.width, stego.height, samples)
}
