//! Separable image steganography over the Paillier cryptosystem.
//!
//! A grayscale cover is encrypted pixel by pixel: each pixel is split into
//! two halves, both halves are encrypted, and one secret bit is stored in the
//! relative order of the two ciphertexts. The bit can be read back with only
//! the hiding key, and the cover can be recovered losslessly with only the
//! private key, in either order.
//!
//! Modular exponentiation is done by a Montgomery core ([`mont`]) whose
//! simultaneous two-base exponentiation computes `g^m · r^n mod n²` in one
//! shared squaring chain.

pub mod bignat;
pub mod cli;
pub mod image_io;
pub mod metrics;
pub mod mont;
pub mod paillier;
pub mod rng;
pub mod stego;

pub use bignat::BigNat;
pub use mont::{MontCtx, MontError};
pub use paillier::{
    keygen, keypair_from_primes, Ciphertext, GeneratorMode, PaillierError, PrivateKey, PublicKey,
};
pub use rng::SplitMix64;
pub use stego::{
    decrypt_reconstruct, embed, extract, pixel_order, split_pixel, GrayImage, HidingKey, Payload,
    StegoError, StegoImage,
};
