//! Paillier public-key encryption.
//!
//! All modular exponentiation over `n²` goes through a shared [`MontCtx`];
//! encryption is one simultaneous exponentiation `g^m · r^n mod n²`.

mod keyfile;
pub mod prime;

use std::sync::Arc;

use rand::RngCore;
use thiserror::Error;

use crate::bignat::BigNat;
use crate::mont::{MontCtx, MontError};

pub use keyfile::{parse_private_key, parse_public_key};

pub const MIN_KEY_BITS: u64 = 9;
pub const MAX_KEY_BITS: u64 = 2048;

const PRIME_BUDGET_PER_BIT: usize = 200;
const PAIR_ATTEMPTS: usize = 1000;
const GENERATOR_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaillierError {
    #[error("key size must be between {MIN_KEY_BITS} and {MAX_KEY_BITS} bits, got {0}")]
    InvalidBits(u64),
    #[error("prime search exhausted its retry budget")]
    PrimeSearchExhausted,
    #[error("message is not below the public modulus")]
    MessageOutOfRange,
    #[error("randomizer must lie in [1, n) and be coprime to n")]
    BadRandomizer,
    #[error("ciphertext is not in (0, n^2)")]
    CiphertextOutOfRange,
    #[error("ciphertext does not decrypt under this key")]
    MalformedCiphertext,
    #[error("invalid key: {0}")]
    InvalidKey(&'static str),
    #[error("malformed key file: {0}")]
    KeyFormat(String),
    #[error(transparent)]
    Mont(#[from] MontError),
}

/// How keygen picks the generator `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneratorMode {
    /// `g = n + 1`.
    #[default]
    NPlusOne,
    /// Uniform in `Z*_{n²}`, retried until `L(g^λ mod n²)` is invertible mod `n`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ciphertext(BigNat);

impl Ciphertext {
    /// Wraps a raw value; range checks happen where the key is known.
    pub fn new(value: BigNat) -> Self {
        Ciphertext(value)
    }

    pub fn value(&self) -> &BigNat {
        &self.0
    }

    pub fn into_inner(self) -> BigNat {
        self.0
    }
}

impl From<BigNat> for Ciphertext {
    fn from(v: BigNat) -> Self {
        Ciphertext(v)
    }
}

#[derive(Debug, Clone)]
pub struct PublicKey {
    n: BigNat,
    g: BigNat,
    n_sq: BigNat,
    ctx: Arc<MontCtx>,
}

impl PartialEq for PublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.g == other.g
    }
}

impl Eq for PublicKey {}

#[derive(Debug, Clone)]
pub struct PrivateKey {
    lambda: BigNat,
    mu: BigNat,
    n: BigNat,
    n_sq: BigNat,
    ctx: Arc<MontCtx>,
}

impl PartialEq for PrivateKey {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.lambda == other.lambda && self.mu == other.mu
    }
}

impl Eq for PrivateKey {}

fn check_modulus(n: &BigNat) -> Result<(), PaillierError> {
    if !n.is_odd() || *n < BigNat::from_u64(15) {
        return Err(PaillierError::InvalidKey("n must be odd and at least 15"));
    }
    Ok(())
}

/// `L(x) = (x - 1) / n`, `None` unless the division is exact.
fn l_function(x: &BigNat, n: &BigNat) -> Option<BigNat> {
    let shifted = x.checked_sub(&BigNat::one())?;
    let (q, r) = shifted.div_rem(n);
    r.is_zero().then_some(q)
}

impl PublicKey {
    pub fn new(n: BigNat, g: BigNat) -> Result<Self, PaillierError> {
        check_modulus(&n)?;
        let n_sq = &n * &n;
        if g.is_zero() || g >= n_sq {
            return Err(PaillierError::InvalidKey("g must lie in (0, n^2)"));
        }
        if !g.gcd(&n).is_one() {
            return Err(PaillierError::InvalidKey("g must be coprime to n"));
        }
        let ctx = Arc::new(MontCtx::new(&n_sq)?);
        Ok(PublicKey { n, g, n_sq, ctx })
    }

    pub fn n(&self) -> &BigNat {
        &self.n
    }

    pub fn g(&self) -> &BigNat {
        &self.g
    }

    pub fn n_squared(&self) -> &BigNat {
        &self.n_sq
    }

    /// Montgomery context over `n²`, shared with clones of this key.
    pub fn mont_ctx(&self) -> &MontCtx {
        &self.ctx
    }

    fn check_ciphertext(&self, c: &Ciphertext) -> Result<(), PaillierError> {
        if c.0.is_zero() || c.0 >= self.n_sq {
            return Err(PaillierError::CiphertextOutOfRange);
        }
        Ok(())
    }

    /// `g^m · r^n mod n²`.
    pub fn encrypt(&self, m: &BigNat, r: &BigNat) -> Result<Ciphertext, PaillierError> {
        if *m >= self.n {
            return Err(PaillierError::MessageOutOfRange);
        }
        if r.is_zero() || *r >= self.n || !r.gcd(&self.n).is_one() {
            return Err(PaillierError::BadRandomizer);
        }
        let c = self.ctx.mont_sim_exp(&self.g, r, m, &self.n)?;
        Ok(Ciphertext(c))
    }

    /// Encrypts under a fresh randomizer drawn from `rng`.
    pub fn encrypt_with<R: RngCore + ?Sized>(
        &self,
        m: &BigNat,
        rng: &mut R,
    ) -> Result<Ciphertext, PaillierError> {
        let r = self.random_randomizer(rng);
        self.encrypt(m, &r)
    }

    /// Uniform `r` in `[1, n)` with `gcd(r, n) = 1`.
    pub fn random_randomizer<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigNat {
        loop {
            let r = BigNat::random_below(rng, &self.n);
            if !r.is_zero() && r.gcd(&self.n).is_one() {
                return r;
            }
        }
    }

    /// Product of ciphertexts; decrypts to the sum of plaintexts mod `n`.
    pub fn hom_add(&self, c1: &Ciphertext, c2: &Ciphertext) -> Result<Ciphertext, PaillierError> {
        self.check_ciphertext(c1)?;
        self.check_ciphertext(c2)?;
        Ok(Ciphertext(&(&c1.0 * &c2.0) % &self.n_sq))
    }

    /// `c^k mod n²`; decrypts to `k · m mod n`.
    pub fn hom_scalar(&self, c: &Ciphertext, scalar: &BigNat) -> Result<Ciphertext, PaillierError> {
        self.check_ciphertext(c)?;
        Ok(Ciphertext(self.ctx.mont_exp(&c.0, scalar)?))
    }
}

impl PrivateKey {
    /// Rebuilds a private key from stored parts. `mu` cannot be checked
    /// against `g` here; a wrong value shows up as wrong plaintexts.
    pub fn new(n: BigNat, lambda: BigNat, mu: BigNat) -> Result<Self, PaillierError> {
        check_modulus(&n)?;
        if lambda.is_zero() {
            return Err(PaillierError::InvalidKey("lambda must be positive"));
        }
        if mu.is_zero() || mu >= n {
            return Err(PaillierError::InvalidKey("mu must lie in (0, n)"));
        }
        let n_sq = &n * &n;
        let ctx = Arc::new(MontCtx::new(&n_sq)?);
        Ok(PrivateKey { lambda, mu, n, n_sq, ctx })
    }

    pub fn n(&self) -> &BigNat {
        &self.n
    }

    pub fn lambda(&self) -> &BigNat {
        &self.lambda
    }

    pub fn mu(&self) -> &BigNat {
        &self.mu
    }

    pub fn mont_ctx(&self) -> &MontCtx {
        &self.ctx
    }

    /// `L(c^λ mod n²) · μ mod n`.
    pub fn decrypt(&self, c: &Ciphertext) -> Result<BigNat, PaillierError> {
        if c.0.is_zero() || c.0 >= self.n_sq {
            return Err(PaillierError::CiphertextOutOfRange);
        }
        let x = self.ctx.mont_exp(&c.0, &self.lambda)?;
        let l = l_function(&x, &self.n).ok_or(PaillierError::MalformedCiphertext)?;
        Ok(&(&l * &self.mu) % &self.n)
    }
}

/// Builds a key pair from two primes. `g = None` selects `n + 1`.
///
/// Primality of `p` and `q` is the caller's responsibility.
pub fn keypair_from_primes(
    p: &BigNat,
    q: &BigNat,
    g: Option<BigNat>,
) -> Result<(PublicKey, PrivateKey), PaillierError> {
    if p == q {
        return Err(PaillierError::InvalidKey("p and q must be distinct"));
    }
    let n = p * q;
    let one = BigNat::one();
    let p1 = p.checked_sub(&one).ok_or(PaillierError::InvalidKey("p must be positive"))?;
    let q1 = q.checked_sub(&one).ok_or(PaillierError::InvalidKey("q must be positive"))?;
    if !n.gcd(&(&p1 * &q1)).is_one() {
        return Err(PaillierError::InvalidKey("gcd(pq, (p-1)(q-1)) must be 1"));
    }
    let lambda = p1.lcm(&q1);
    let g = g.unwrap_or_else(|| &n + &one);
    let pk = PublicKey::new(n.clone(), g)?;
    let mu = generator_mu(&pk, &lambda)
        .ok_or(PaillierError::InvalidKey("L(g^lambda mod n^2) is not invertible mod n"))?;
    let sk = PrivateKey {
        lambda,
        mu,
        n,
        n_sq: pk.n_sq.clone(),
        ctx: Arc::clone(&pk.ctx),
    };
    Ok((pk, sk))
}

/// `μ = L(g^λ mod n²)^-1 mod n`, if it exists.
fn generator_mu(pk: &PublicKey, lambda: &BigNat) -> Option<BigNat> {
    let x = pk.ctx.mont_exp(&pk.g, lambda).ok()?;
    let l = l_function(&x, &pk.n)?;
    l.mod_inverse(&pk.n).filter(|mu| !mu.is_zero())
}

/// Generates a key pair whose modulus has exactly `bits` bits.
pub fn keygen<R: RngCore + ?Sized>(
    bits: u64,
    mode: GeneratorMode,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey), PaillierError> {
    if !(MIN_KEY_BITS..=MAX_KEY_BITS).contains(&bits) {
        return Err(PaillierError::InvalidBits(bits));
    }
    let p_bits = bits.div_ceil(2);
    let q_bits = bits / 2;
    let budget = PRIME_BUDGET_PER_BIT * bits as usize;

    for _ in 0..PAIR_ATTEMPTS {
        let p = prime::random_prime(p_bits, budget, rng).ok_or(PaillierError::PrimeSearchExhausted)?;
        let q = prime::random_prime(q_bits, budget, rng).ok_or(PaillierError::PrimeSearchExhausted)?;
        let (pk, sk) = match keypair_from_primes(&p, &q, None) {
            Ok(pair) => pair,
            Err(PaillierError::InvalidKey(_)) => continue,
            Err(e) => return Err(e),
        };
        debug_assert_eq!(pk.n.bits(), bits);
        return match mode {
            GeneratorMode::NPlusOne => Ok((pk, sk)),
            GeneratorMode::Random => with_random_generator(pk, sk, rng),
        };
    }
    Err(PaillierError::PrimeSearchExhausted)
}

fn with_random_generator<R: RngCore + ?Sized>(
    pk: PublicKey,
    sk: PrivateKey,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey), PaillierError> {
    for _ in 0..GENERATOR_ATTEMPTS {
        let g = BigNat::random_below(rng, &pk.n_sq);
        if g.is_zero() || !g.gcd(&pk.n).is_one() {
            continue;
        }
        let candidate = PublicKey {
            g,
            ..pk.clone()
        };
        if let Some(mu) = generator_mu(&candidate, &sk.lambda) {
            let sk = PrivateKey { mu, ..sk };
            return Ok((candidate, sk));
        }
    }
    Err(PaillierError::PrimeSearchExhausted)
}
