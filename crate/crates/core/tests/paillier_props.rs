mod common;

use common::*;
use hestego::paillier::{parse_private_key, parse_public_key};
use hestego::{keygen, keypair_from_primes, BigNat, Ciphertext, GeneratorMode, PaillierError, SplitMix64};
use num_bigint::BigUint;
use proptest::prelude::*;

fn toy() -> (hestego::PublicKey, hestego::PrivateKey) {
    keypair_from_primes(&BigNat::from_u64(5), &BigNat::from_u64(7), None).unwrap()
}

fn unit_below(rng: &mut SplitMix64, n: &BigNat) -> BigNat {
    loop {
        let r = BigNat::random_below(rng, n);
        if !r.is_zero() && r.gcd(n).is_one() {
            return r;
        }
    }
}

/// Textbook encryption straight from the definition.
fn oracle_encrypt(n: &BigUint, g: &BigUint, m: &BigUint, r: &BigUint) -> BigUint {
    let n_sq = n * n;
    naive_modpow(g, m, &n_sq) * naive_modpow(r, n, &n_sq) % &n_sq
}

#[test]
fn toy_key_exhaustive() {
    let (pk, sk) = toy();
    assert_eq!(sk.lambda(), &BigNat::from_u64(12));
    assert_eq!(sk.mu(), &BigNat::from_u64(3));
    let n = BigNat::from_u64(35);
    for m in 0..35u64 {
        for r in 1..35u64 {
            let r = BigNat::from_u64(r);
            if !r.gcd(&n).is_one() {
                assert_eq!(pk.encrypt(&BigNat::from_u64(m), &r), Err(PaillierError::BadRandomizer));
                continue;
            }
            let c = pk.encrypt(&BigNat::from_u64(m), &r).unwrap();
            assert_eq!(uint(c.value()), oracle_encrypt(&big(35), &big(36), &big(m), &uint(&r)));
            assert_eq!(sk.decrypt(&c).unwrap(), BigNat::from_u64(m));
        }
    }
    let c = pk.encrypt(&BigNat::from_u64(3), &BigNat::from_u64(4)).unwrap();
    assert_eq!(c.value(), &BigNat::from_u64(44));
}

#[test]
fn binomial_identity_for_default_generator() {
    // (n+1)^m = 1 + m·n mod n²
    let mut rng = SplitMix64::new(3);
    for bits in [12u64, 64, 256] {
        let (pk, _) = keygen(bits, GeneratorMode::NPlusOne, &mut rng).unwrap();
        let n = uint(pk.n());
        let n_sq = &n * &n;
        for _ in 0..20 {
            let m = random_below(&mut rng, &n);
            let c = pk.encrypt(&nat(&m), &BigNat::one()).unwrap();
            assert_eq!(uint(c.value()), (BigUint::from(1u32) + &m * &n) % &n_sq);
        }
    }
}

#[test]
fn encryption_matches_textbook_oracle() {
    let mut rng = SplitMix64::new(4);
    for (bits, mode) in [(12u64, GeneratorMode::Random), (64, GeneratorMode::Random), (128, GeneratorMode::NPlusOne)] {
        let (pk, sk) = keygen(bits, mode, &mut rng).unwrap();
        for _ in 0..50 {
            let m = BigNat::random_below(&mut rng, pk.n());
            let r = unit_below(&mut rng, pk.n());
            let c = pk.encrypt(&m, &r).unwrap();
            assert_eq!(uint(c.value()), oracle_encrypt(&uint(pk.n()), &uint(pk.g()), &uint(&m), &uint(&r)));
            assert_eq!(sk.decrypt(&c).unwrap(), m);
        }
    }
}

#[test]
fn encryption_costs_one_simultaneous_exponentiation() {
    let mut rng = SplitMix64::new(5);
    let (pk, _) = keygen(128, GeneratorMode::NPlusOne, &mut rng).unwrap();
    let n = pk.n().clone();
    for _ in 0..20 {
        let m = BigNat::random_below(&mut rng, &n);
        let r = unit_below(&mut rng, &n);
        let before = pk.mont_ctx().mul_count();
        pk.encrypt(&m, &r).unwrap();
        let delta = pk.mont_ctx().mul_count() - before;
        let union = m.as_biguint() | n.as_biguint();
        assert_eq!(delta, 5 + m.bits().max(n.bits()) + union.count_ones());
    }
}

#[test]
fn fresh_randomizers_give_distinct_ciphertexts() {
    let mut rng = SplitMix64::new(6);
    let (pk, sk) = keygen(64, GeneratorMode::NPlusOne, &mut rng).unwrap();
    let m = BigNat::from_u64(42);
    let cts: Vec<Ciphertext> = (0..200).map(|_| pk.encrypt_with(&m, &mut rng).unwrap()).collect();
    let mut values: Vec<_> = cts.iter().map(|c| c.value().clone()).collect();
    values.sort();
    values.dedup();
    assert_eq!(values.len(), cts.len());
    assert!(cts.iter().all(|c| sk.decrypt(c).unwrap() == m));
}

#[test]
fn homomorphisms_wrap_modulo_n() {
    let mut rng = SplitMix64::new(7);
    let (pk, sk) = keygen(12, GeneratorMode::NPlusOne, &mut rng).unwrap();
    let n = pk.n().clone();
    let top = n.checked_sub(&BigNat::one()).unwrap();
    let c1 = pk.encrypt_with(&top, &mut rng).unwrap();
    let c2 = pk.encrypt_with(&top, &mut rng).unwrap();
    let sum = pk.hom_add(&c1, &c2).unwrap();
    assert_eq!(sk.decrypt(&sum).unwrap(), n.checked_sub(&BigNat::from_u64(2)).unwrap());
    let scaled = pk.hom_scalar(&c1, &n).unwrap();
    assert_eq!(sk.decrypt(&scaled).unwrap(), BigNat::zero());
    let scaled = pk.hom_scalar(&c1, &BigNat::zero()).unwrap();
    assert_eq!(sk.decrypt(&scaled).unwrap(), BigNat::zero());
}

#[test]
fn key_text_round_trip() {
    let mut rng = SplitMix64::new(8);
    for mode in [GeneratorMode::NPlusOne, GeneratorMode::Random] {
        let (pk, sk) = keygen(96, mode, &mut rng).unwrap();
        let pk2 = parse_public_key(&pk.to_text()).unwrap();
        let sk2 = parse_private_key(&sk.to_text()).unwrap();
        assert_eq!(pk2.to_text(), pk.to_text());
        assert_eq!(sk2.to_text(), sk.to_text());
        let c = pk2.encrypt_with(&BigNat::from_u64(77), &mut rng).unwrap();
        assert_eq!(sk.decrypt(&c).unwrap(), BigNat::from_u64(77));
    }
    assert!(parse_public_key("paillier-public v1\nn=23\n").is_err());
    assert!(parse_public_key("paillier-public v1\nn=023\ng=24\n").is_err());
}

#[test]
fn out_of_range_inputs_rejected() {
    let (pk, sk) = toy();
    assert_eq!(pk.encrypt(&BigNat::from_u64(35), &BigNat::one()), Err(PaillierError::MessageOutOfRange));
    assert_eq!(pk.encrypt(&BigNat::one(), &BigNat::zero()), Err(PaillierError::BadRandomizer));
    assert!(sk.decrypt(&Ciphertext::new(BigNat::from_u64(1225))).is_err());
    assert!(sk.decrypt(&Ciphertext::new(BigNat::zero())).is_err());
}

fn key_for(bits: u64) -> (hestego::PublicKey, hestego::PrivateKey) {
    keygen(bits, GeneratorMode::NPlusOne, &mut SplitMix64::new(bits)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prop_round_trip_and_laws(bits in prop::sample::select(vec![12u64, 32, 64, 160]), seed: u64, k: u64) {
        let (pk, sk) = key_for(bits);
        let mut rng = SplitMix64::new(seed);
        let n = pk.n().clone();
        let m1 = BigNat::random_below(&mut rng, &n);
        let m2 = BigNat::random_below(&mut rng, &n);
        let c1 = pk.encrypt_with(&m1, &mut rng).unwrap();
        let c2 = pk.encrypt_with(&m2, &mut rng).unwrap();
        prop_assert_eq!(sk.decrypt(&c1).unwrap(), m1.clone());
        prop_assert_eq!(sk.decrypt(&pk.hom_add(&c1, &c2).unwrap()).unwrap(), &(&m1 + &m2) % &n);
        let k = BigNat::from_u64(k);
        prop_assert_eq!(sk.decrypt(&pk.hom_scalar(&c1, &k).unwrap()).unwrap(), &(&m1 * &k) % &n);
    }
}
