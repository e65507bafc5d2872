//! Cover and carrier persistence.
//!
//! Covers are binary PGM (`P5`, maxval 255). Carriers are stored in the
//! `PST1` container:
//!
//! ```text
//! "PST1" | width u32 BE | height u32 BE | mod_len u16 BE | n (mod_len bytes, BE)
//! | 2·width·height ciphertexts, each 2·mod_len bytes BE, pair-adjacent, row-major
//! ```
//!
//! When `n² ≤ 2^24` a carrier can also be rendered as an RGB image of size
//! `2W × H`: each ciphertext becomes one pixel with `R, G, B` its base-256
//! digits, most significant first, and the two ciphertexts of a cover pixel
//! sit side by side.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::bignat::BigNat;
use crate::paillier::Ciphertext;
use crate::stego::{GrayImage, StegoError, StegoImage};

pub const CONTAINER_MAGIC: &[u8; 4] = b"PST1";
const CONTAINER_HEADER_LEN: usize = 4 + 4 + 4 + 2;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated image file")]
    TruncatedFile,
    #[error("not a PST1 container")]
    BadMagic,
    #[error("container length does not match its header")]
    LengthMismatch,
    #[error("container modulus is malformed")]
    BadModulus,
    #[error("ciphertext is not in (0, n^2)")]
    CiphertextOutOfRange,
    #[error("RGB rendering needs n^2 <= 2^24")]
    ModulusTooLargeForRender,
    #[error("render has odd width or wrong buffer size")]
    BadRender,
    #[error("png: {0}")]
    Png(String),
    #[error(transparent)]
    Stego(#[from] StegoError),
}

// ---------------------------------------------------------------------------
// PGM

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, ImageIoError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                ImageIoError::TruncatedFile
            } else {
                ImageIoError::UnsupportedFormat("bad PGM header".into())
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageIoError::UnsupportedFormat("PGM header value overflows".into()))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    if bytes.len() < 2 {
        return Err(ImageIoError::TruncatedFile);
    }
    if &bytes[..2] != b"P5" {
        return Err(ImageIoError::UnsupportedFormat(format!(
            "expected binary PGM (P5), found {:?}",
            String::from_utf8_lossy(&bytes[..2])
        )));
    }
    let mut header = HeaderReader { bytes, pos: 2 };
    let width = header.number()?;
    let height = header.number()?;
    let maxval = header.number()?;
    if maxval != 255 {
        return Err(ImageIoError::UnsupportedFormat(format!("maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        Some(_) => return Err(ImageIoError::UnsupportedFormat("bad PGM header".into())),
        None => return Err(ImageIoError::TruncatedFile),
    }
    let count = width as usize * height as usize;
    let raster = &bytes[header.pos..];
    if raster.len() < count {
        return Err(ImageIoError::TruncatedFile);
    }
    Ok(GrayImage::new(width, height, raster[..count].to_vec())?)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageIoError> {
    decode_pgm(&fs::read(path)?)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    Ok(fs::write(path, encode_pgm(img))?)
}

// ---------------------------------------------------------------------------
// PST1 container

pub fn encode_container(stego: &StegoImage) -> Vec<u8> {
    let n_bytes = stego.n().to_bytes_be();
    let mod_len = n_bytes.len();
    assert!(mod_len <= u16::MAX as usize, "modulus too wide for PST1");
    let ct_len = 2 * mod_len;

    let mut out = Vec::with_capacity(CONTAINER_HEADER_LEN + mod_len + stego.pairs().len() * 2 * ct_len);
    out.extend_from_slice(CONTAINER_MAGIC);
    out.extend_from_slice(&stego.width().to_be_bytes());
    out.extend_from_slice(&stego.height().to_be_bytes());
    out.extend_from_slice(&(mod_len as u16).to_be_bytes());
    out.extend_from_slice(&n_bytes);
    for (first, second) in stego.pairs() {
        for c in [first, second] {
            let bytes = c
                .value()
                .to_bytes_be_padded(ct_len)
                .expect("ciphertext below n^2 fits 2*mod_len bytes");
            out.extend_from_slice(&bytes);
        }
    }
    out
}

pub fn decode_container(bytes: &[u8]) -> Result<StegoImage, ImageIoError> {
    if bytes.len() < 4 {
        return Err(ImageIoError::LengthMismatch);
    }
    if &bytes[..4] != CONTAINER_MAGIC {
        return Err(ImageIoError::BadMagic);
    }
    if bytes.len() < CONTAINER_HEADER_LEN {
        return Err(ImageIoError::LengthMismatch);
    }
    let width = u32::from_be_bytes(bytes[4..8].try_into().unwrap());
    let height = u32::from_be_bytes(bytes[8..12].try_into().unwrap());
    let mod_len = u16::from_be_bytes(bytes[12..14].try_into().unwrap()) as usize;
    let rest = &bytes[CONTAINER_HEADER_LEN..];
    if rest.len() < mod_len {
        return Err(ImageIoError::LengthMismatch);
    }
    let (n_bytes, body) = rest.split_at(mod_len);
    if mod_len == 0 || n_bytes[0] == 0 {
        return Err(ImageIoError::BadModulus);
    }
    let n = BigNat::from_bytes_be(n_bytes);

    let ct_len = 2 * mod_len;
    let expected = (width as u128) * (height as u128) * 2 * ct_len as u128;
    if body.len() as u128 != expected {
        return Err(ImageIoError::LengthMismatch);
    }
    let n_sq = &n * &n;
    let mut cts = body.chunks_exact(ct_len).map(|chunk| {
        let v = BigNat::from_bytes_be(chunk);
        if v.is_zero() || v >= n_sq {
            Err(ImageIoError::CiphertextOutOfRange)
        } else {
            Ok(Ciphertext::new(v))
        }
    });
    let mut pairs = Vec::with_capacity(width as usize * height as usize);
    while let Some(first) = cts.next() {
        let second = cts.next().ok_or(ImageIoError::LengthMismatch)?;
        pairs.push((first?, second?));
    }
    Ok(StegoImage::new(width, height, n, pairs)?)
}

pub fn save_container(stego: &StegoImage, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    Ok(fs::write(path, encode_container(stego))?)
}

pub fn load_container(path: impl AsRef<Path>) -> Result<StegoImage, ImageIoError> {
    decode_container(&fs::read(path)?)
}

// ---------------------------------------------------------------------------
// RGB render

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbRender {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

fn renderable(n: &BigNat) -> bool {
    (n * n) <= BigNat::from_u64(1 << 24)
}

fn ciphertext_rgb(c: &Ciphertext) -> [u8; 3] {
    let v = c.value().to_u64().expect("renderable ciphertext fits 24 bits");
    [(v >> 16) as u8, (v >> 8) as u8, v as u8]
}

pub fn render_rgb(stego: &StegoImage) -> Result<RgbRender, ImageIoError> {
    if !renderable(stego.n()) {
        return Err(ImageIoError::ModulusTooLargeForRender);
    }
    let mut data = Vec::with_capacity(stego.pairs().len() * 6);
    for (first, second) in stego.pairs() {
        data.extend_from_slice(&ciphertext_rgb(first));
        data.extend_from_slice(&ciphertext_rgb(second));
    }
    Ok(RgbRender {
        width: stego.width() * 2,
        height: stego.height(),
        data,
    })
}

/// Inverse of [`render_rgb`] given the public modulus.
pub fn derender_rgb(render: &RgbRender, n: &BigNat) -> Result<StegoImage, ImageIoError> {
    if !renderable(n) {
        return Err(ImageIoError::ModulusTooLargeForRender);
    }
    if !render.width.is_multiple_of(2)
        || render.data.len() as u64 != render.width as u64 * render.height as u64 * 3
    {
        return Err(ImageIoError::BadRender);
    }
    let to_ct = |px: &[u8]| {
        Ciphertext::new(BigNat::from_u64(
            (px[0] as u64) << 16 | (px[1] as u64) << 8 | px[2] as u64,
        ))
    };
    let pairs = render
        .data
        .chunks_exact(6)
        .map(|px| (to_ct(&px[..3]), to_ct(&px[3..])))
        .collect();
    StegoImage::new(render.width / 2, render.height, n.clone(), pairs).map_err(|e| match e {
        StegoError::CiphertextOutOfRange => ImageIoError::CiphertextOutOfRange,
        other => other.into(),
    })
}

pub fn save_render_png(render: &RgbRender, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let buf = image::RgbImage::from_raw(render.width, render.height, render.data.clone())
        .ok_or(ImageIoError::BadRender)?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| ImageIoError::Png(e.to_string()))
}

pub fn load_render_png(path: impl AsRef<Path>) -> Result<RgbRender, ImageIoError> {
    let img = image::open(path).map_err(|e| ImageIoError::Png(e.to_string()))?;
    let rgb = match img {
        image::DynamicImage::ImageRgb8(rgb) => rgb,
        _ => return Err(ImageIoError::UnsupportedFormat("expected 8-bit RGB PNG".into())),
    };
    Ok(RgbRender {
        width: rgb.width(),
        height: rgb.height(),
        data: rgb.into_raw(),
    })
}
