//! Image quality and exponentiation cost measurements.

use std::fmt;
use std::time::Instant;

use rand::RngCore;
use thiserror::Error;

use crate::bignat::BigNat;
use crate::mont::MontCtx;
use crate::stego::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("images differ in size: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("throughput needs a positive cycle count and frequency")]
    DivideByZero,
    #[error("invalid benchmark parameters: {0}")]
    InvalidParameters(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    /// Zero mean squared error.
    Lossless,
    Db(f64),
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Lossless => f.write_str("lossless"),
            Psnr::Db(db) => write!(f, "{db:.4}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr: Psnr,
    /// Embedded payload bits per cover pixel; 0 when no payload is attached.
    pub bpp: f64,
}

impl QualityReport {
    /// Attaches the embedding rate for `payload_bits` over `pixels`.
    pub fn with_rate(self, payload_bits: usize, pixels: usize) -> Self {
        QualityReport {
            bpp: embedding_rate(payload_bits, pixels),
            ..self
        }
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mse={} psnr={} bpp={}", self.mse, self.psnr, self.bpp)
    }
}

pub fn embedding_rate(payload_bits: usize, pixels: usize) -> f64 {
    if pixels == 0 {
        0.0
    } else {
        payload_bits as f64 / pixels as f64
    }
}

/// Mean squared error and PSNR against a peak of 255.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<QualityReport, MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch(a.width(), a.height(), b.width(), b.height()));
    }
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    let count = a.pixel_count().max(1);
    let mse = sum as f64 / count as f64;
    let psnr = if sum == 0 {
        Psnr::Lossless
    } else {
        Psnr::Db(10.0 * (255.0f64 * 255.0 / mse).log10())
    };
    Ok(QualityReport { mse, psnr, bpp: 0.0 })
}

/// Bits per second: `input_bits · frequency / cycles`.
pub fn throughput(input_bits: u64, frequency_hz: f64, cycles: u64) -> Result<f64, MetricsError> {
    if cycles == 0 || frequency_hz <= 0.0 || !frequency_hz.is_finite() {
        return Err(MetricsError::DivideByZero);
    }
    Ok(input_bits as f64 * frequency_hz / cycles as f64)
}

/// Pixels per second for pixels of `bits_per_pixel` bits.
pub fn pixel_throughput(
    input_bits: u64,
    frequency_hz: f64,
    cycles: u64,
    bits_per_pixel: u32,
) -> Result<f64, MetricsError> {
    if bits_per_pixel == 0 {
        return Err(MetricsError::DivideByZero);
    }
    Ok(throughput(input_bits, frequency_hz, cycles)? / bits_per_pixel as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub k_bits: u64,
    pub trials: usize,
    /// Mean `MontP` calls per simultaneous exponentiation.
    pub montp_sim: f64,
    /// Mean `MontP` calls for the same two exponentiations done one after the other.
    pub montp_seq: f64,
    pub ratio: f64,
    /// Largest per-trial sim/sequential ratio observed.
    pub max_trial_ratio: f64,
    pub wall_ns_sim: f64,
    pub wall_ns_seq: f64,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k_bits={} trials={} montp_sim={:.2} montp_seq={:.2} ratio={:.4} max_trial_ratio={:.4} \
             sim_per_k={:.4} wall_ns_sim={:.0} wall_ns_seq={:.0}",
            self.k_bits,
            self.trials,
            self.montp_sim,
            self.montp_seq,
            self.ratio,
            self.max_trial_ratio,
            self.montp_sim / self.k_bits as f64,
            self.wall_ns_sim,
            self.wall_ns_seq
        )
    }
}

/// Compares one simultaneous exponentiation against two sequential ones.
///
/// Each trial draws a fresh odd `k`-bit modulus, two bases below it and two
/// `k`-bit exponents with the top bit set.
pub fn bench_exponentiation<R: RngCore + ?Sized>(
    k_bits: u64,
    trials: usize,
    rng: &mut R,
) -> Result<BenchReport, MetricsError> {
    if k_bits < 8 {
        return Err(MetricsError::InvalidParameters("k_bits must be at least 8"));
    }
    if trials < 100 {
        return Err(MetricsError::InvalidParameters("trials must be at least 100"));
    }

    let mut sim_total = 0u64;
    let mut seq_total = 0u64;
    let mut max_trial_ratio = 0f64;
    let mut sim_ns = 0u128;
    let mut seq_ns = 0u128;
    for _ in 0..trials {
        let mut modulus = BigNat::random_bits(rng, k_bits);
        if !modulus.is_odd() {
            modulus = &modulus + &BigNat::one();
        }
        let ctx = MontCtx::new(&modulus).expect("odd modulus of at least 8 bits");
        let g0 = BigNat::random_below(rng, &modulus);
        let g1 = BigNat::random_below(rng, &modulus);
        let e0 = BigNat::random_bits(rng, k_bits);
        let e1 = BigNat::random_bits(rng, k_bits);

        let t = Instant::now();
        let (sim_value, sim_calls) = ctx.mont_sim_exp_counted(&g0, &g1, &e0, &e1).expect("bases reduced");
        sim_ns += t.elapsed().as_nanos();

        let t = Instant::now();
        let (a, calls_a) = ctx.mont_exp_counted(&g0, &e0).expect("bases reduced");
        let (b, calls_b) = ctx.mont_exp_counted(&g1, &e1).expect("bases reduced");
        seq_ns += t.elapsed().as_nanos();
        debug_assert_eq!(sim_value, &(&a * &b) % &modulus);

        let seq_calls = calls_a + calls_b;
        sim_total += sim_calls;
        seq_total += seq_calls;
        max_trial_ratio = max_trial_ratio.max(sim_calls as f64 / seq_calls as f64);
    }

    let montp_sim = sim_total as f64 / trials as f64;
    let montp_seq = seq_total as f64 / trials as f64;
    Ok(BenchReport {
        k_bits,
        trials,
        montp_sim,
        montp_seq,
        ratio: montp_sim / montp_seq,
        max_trial_ratio,
        wall_ns_sim: sim_ns as f64 / trials as f64,
        wall_ns_seq: seq_ns as f64 / trials as f64,
    })
}
