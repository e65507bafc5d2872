mod common;

use common::*;
use hestego::image_io::{self, ImageIoError};
use hestego::metrics::{psnr, Psnr};
use hestego::stego::FRAME_HEADER_BITS;
use hestego::{
    decrypt_reconstruct, embed, extract, keygen, BigNat, GeneratorMode, GrayImage, HidingKey, Payload,
    PrivateKey, PublicKey, SplitMix64, StegoError, StegoImage,
};
use proptest::prelude::*;

fn key(bits: u64, seed: u64) -> (PublicKey, PrivateKey) {
    keygen(bits, GeneratorMode::NPlusOne, &mut SplitMix64::new(seed)).unwrap()
}

fn carrier(side: u32, payload_len: usize, seed: u64) -> (GrayImage, Payload, StegoImage, PrivateKey) {
    let (pk, sk) = key(12, seed);
    let cover = synthetic_cover(side, seed);
    let mut rng = SplitMix64::new(seed ^ 0xabc);
    let payload = Payload::from_bytes(random_bytes(&mut rng, payload_len));
    let stego = embed(&cover, &payload, &pk, HidingKey(seed), &mut rng).unwrap();
    (cover, payload, stego, sk)
}

#[test]
fn round_trip_many_seeds() {
    for seed in 0..100u64 {
        let side = [8u32, 16, 32][seed as usize % 3];
        let max_bytes = (side * side) as usize / 8 - FRAME_HEADER_BITS / 8;
        let (cover, payload, stego, sk) = carrier(side, seed as usize % (max_bytes + 1), seed);
        assert_eq!(extract(&stego, HidingKey(seed)).unwrap(), payload);
        assert_eq!(decrypt_reconstruct(&stego, &sk).unwrap(), cover);
    }
}

#[test]
fn separable_in_either_order() {
    let (cover, payload, stego, sk) = carrier(32, 60, 11);

    let extracted_first = extract(&stego, HidingKey(11)).unwrap();
    let decrypted_second = decrypt_reconstruct(&stego, &sk).unwrap();

    let decrypted_first = decrypt_reconstruct(&stego, &sk).unwrap();
    let extracted_second = extract(&stego, HidingKey(11)).unwrap();

    assert_eq!(extracted_first, payload);
    assert_eq!(extracted_second, payload);
    assert_eq!(decrypted_first, cover);
    assert_eq!(decrypted_second, cover);
    assert_eq!(psnr(&cover, &decrypted_first).unwrap().psnr, Psnr::Lossless);
}

#[test]
fn pair_order_encodes_framed_bits() {
    let (_, payload, stego, _) = carrier(16, 20, 12);
    let order = hestego::pixel_order(HidingKey(12), 256);
    let bit_of = |i: usize| {
        let (a, b) = &stego.pairs()[order[i]];
        a > b
    };
    let header: u32 = (0..32).fold(0, |acc, i| (acc << 1) | bit_of(i) as u32);
    assert_eq!(header as usize, payload.bit_len());
    for i in 0..payload.bit_len() {
        assert_eq!(bit_of(32 + i), payload.bit(i));
    }
    for i in payload.framed_bits()..256 {
        assert!(!bit_of(i));
    }
}

#[test]
fn wrong_hiding_key_does_not_yield_payload() {
    let (_, payload, stego, _) = carrier(32, 100, 13);
    for k in [0u64, 14, 0xffff_ffff_ffff_ffff] {
        match extract(&stego, HidingKey(k)) {
            Ok(p) => assert_ne!(p, payload),
            Err(StegoError::MalformedFrame(_)) => {}
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }
}

#[test]
fn wrong_private_key_is_rejected() {
    let (_, _, stego, _) = carrier(8, 1, 15);
    let (_, other) = key(14, 99);
    assert_eq!(decrypt_reconstruct(&stego, &other).unwrap_err(), StegoError::KeyMismatch);
}

#[test]
fn bit_granular_payloads() {
    let (pk, _) = key(12, 16);
    let cover = synthetic_cover(8, 16);
    for len in [0usize, 1, 7, 9, 31, 32] {
        let bits: Vec<bool> = (0..len).map(|i| i % 3 == 0).collect();
        let payload = Payload::from_bits(bits);
        let stego = embed(&cover, &payload, &pk, HidingKey(5), &mut SplitMix64::new(1)).unwrap();
        let back = extract(&stego, HidingKey(5)).unwrap();
        assert_eq!(back.bit_len(), len);
        assert_eq!(back, payload);
    }
}

#[test]
fn capacity_is_one_bit_per_pixel() {
    let (pk, _) = key(12, 17);
    let cover = synthetic_cover(16, 17);
    assert_eq!(cover.capacity_bits(), 256);
    let fits = Payload::from_bits(vec![true; 256 - 32]);
    assert!(embed(&cover, &fits, &pk, HidingKey(1), &mut SplitMix64::new(0)).is_ok());
    let over = Payload::from_bits(vec![true; 256 - 31]);
    assert_eq!(
        embed(&cover, &over, &pk, HidingKey(1), &mut SplitMix64::new(0)).unwrap_err(),
        StegoError::PayloadTooLarge { needed: 257, capacity: 256 }
    );
}

#[test]
fn tampered_pairs_are_detected() {
    let (_, _, stego, _) = carrier(8, 2, 18);
    let mut pairs = stego.pairs().to_vec();
    let index = hestego::pixel_order(HidingKey(18), 64)[0];
    pairs[index].1 = pairs[index].0.clone();
    let tied = StegoImage::new(8, 8, stego.n().clone(), pairs).unwrap();
    assert_eq!(extract(&tied, HidingKey(18)).unwrap_err(), StegoError::TiedPair { index });
}

#[test]
fn fixed_seed_embedding_is_reproducible() {
    let (pk, _) = key(12, 19);
    let cover = synthetic_cover(16, 19);
    let payload = Payload::from_bytes(b"reproducible".to_vec());
    let a = embed(&cover, &payload, &pk, HidingKey(3), &mut SplitMix64::new(42)).unwrap();
    let b = embed(&cover, &payload, &pk, HidingKey(3), &mut SplitMix64::new(42)).unwrap();
    assert_eq!(image_io::encode_container(&a), image_io::encode_container(&b));
    let c = embed(&cover, &payload, &pk, HidingKey(3), &mut SplitMix64::new(43)).unwrap();
    assert_ne!(image_io::encode_container(&a), image_io::encode_container(&c));
}

#[test]
fn render_requires_small_modulus() {
    let (pk, _) = key(20, 20);
    let cover = synthetic_cover(6, 20);
    let stego = embed(&cover, &Payload::default(), &pk, HidingKey(0), &mut SplitMix64::new(0)).unwrap();
    assert!(matches!(image_io::render_rgb(&stego), Err(ImageIoError::ModulusTooLargeForRender)));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (cover, payload, stego, sk) = carrier(16, 10, 21);

    let pgm = dir.path().join("cover.pgm");
    image_io::save_pgm(&cover, &pgm).unwrap();
    assert_eq!(image_io::load_pgm(&pgm).unwrap(), cover);

    let pst = dir.path().join("carrier.pst");
    image_io::save_container(&stego, &pst).unwrap();
    let loaded = image_io::load_container(&pst).unwrap();
    assert_eq!(loaded, stego);

    let png = dir.path().join("carrier.png");
    let render = image_io::render_rgb(&stego).unwrap();
    image_io::save_render_png(&render, &png).unwrap();
    let render_back = image_io::load_render_png(&png).unwrap();
    assert_eq!(render_back, render);
    let from_png = image_io::derender_rgb(&render_back, stego.n()).unwrap();
    assert_eq!(from_png, stego);
    assert_eq!(extract(&from_png, HidingKey(21)).unwrap(), payload);
    assert_eq!(decrypt_reconstruct(&from_png, &sk).unwrap(), cover);
}

fn stego_strategy() -> impl Strategy<Value = StegoImage> {
    (1u32..6, 1u32..6, any::<u64>(), 9u64..40).prop_map(|(w, h, seed, bits)| {
        let mut rng = SplitMix64::new(seed);
        let n = BigNat::random_bits(&mut rng, bits);
        let n_sq = &n * &n;
        let pairs = (0..w * h)
            .map(|_| {
                let mut ct = || loop {
                    let v = BigNat::random_below(&mut rng, &n_sq);
                    if !v.is_zero() {
                        return hestego::Ciphertext::new(v);
                    }
                };
                (ct(), ct())
            })
            .collect();
        StegoImage::new(w, h, n, pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prop_container_round_trip(stego in stego_strategy()) {
        let bytes = image_io::encode_container(&stego);
        let back = image_io::decode_container(&bytes).unwrap();
        prop_assert_eq!(image_io::encode_container(&back), bytes);
        prop_assert_eq!(back, stego);
    }

    #[test]
    fn prop_render_round_trip(stego in stego_strategy()) {
        match image_io::render_rgb(&stego) {
            Ok(render) => {
                prop_assert!(stego.n().bits() <= 12);
                prop_assert_eq!(image_io::derender_rgb(&render, stego.n()).unwrap(), stego);
            }
            Err(ImageIoError::ModulusTooLargeForRender) => prop_assert!(stego.n().bits() > 12),
            Err(e) => prop_assert!(false, "{e:?}"),
        }
    }

    #[test]
    fn prop_pgm_round_trip(w in 1u32..20, h in 1u32..20, seed: u64) {
        let mut rng = SplitMix64::new(seed);
        let img = GrayImage::new(w, h, random_bytes(&mut rng, (w * h) as usize)).unwrap();
        prop_assert_eq!(image_io::decode_pgm(&image_io::encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn prop_pixel_order_is_permutation(k: u64, count in 0usize..2000) {
        let mut order = hestego::pixel_order(HidingKey(k), count);
        order.sort_unstable();
        prop_assert_eq!(order, (0..count).collect::<Vec<_>>());
    }

    #[test]
    fn prop_embed_extract_reconstruct(seed: u64, len in 0usize..((64 - 32) / 8 + 1)) {
        let (pk, sk) = key(12, 1);
        let cover = synthetic_cover(8, seed);
        let mut rng = SplitMix64::new(seed);
        let payload = Payload::from_bytes(random_bytes(&mut rng, len));
        let stego = embed(&cover, &payload, &pk, HidingKey(seed), &mut rng).unwrap();
        prop_assert_eq!(extract(&stego, HidingKey(seed)).unwrap(), payload);
        prop_assert_eq!(decrypt_reconstruct(&stego, &sk).unwrap(), cover);
    }
}
