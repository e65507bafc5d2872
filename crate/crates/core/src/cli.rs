//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when the command
//! itself fails (bad key, capacity, file format, I/O). A failing command
//! leaves no output files behind.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};
use thiserror::Error;

use crate::image_io::{self, ImageIoError};
use crate::metrics::{self, MetricsError};
use crate::paillier::{self, GeneratorMode, PaillierError};
use crate::rng::SplitMix64;
use crate::stego::{self, HidingKey, Payload, StegoError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hestego", version, about = "Separable image steganography over Paillier encryption")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair, writing PREFIX.pub and PREFIX.priv
    Keygen {
        #[arg(long)]
        bits: u64,
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
        /// Draw g at random instead of using n + 1
        #[arg(long)]
        random_g: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a cover and hide a payload in it
    Embed {
        #[arg(long, value_name = "PGM")]
        cover: PathBuf,
        #[arg(long, value_name = "FILE")]
        payload: PathBuf,
        #[arg(long, value_name = "FILE")]
        pubkey: PathBuf,
        #[arg(long, value_name = "HEX16")]
        hiding_key: String,
        #[arg(long, value_name = "PST")]
        out: PathBuf,
        /// Also write an RGB PNG rendering of the carrier
        #[arg(long, value_name = "PNG")]
        render: Option<PathBuf>,
        /// Deterministic randomizer stream
        #[arg(long, value_name = "U64")]
        seed: Option<u64>,
    },
    /// Recover the hidden payload using only the hiding key
    Extract {
        #[arg(long, value_name = "PST")]
        stego: PathBuf,
        #[arg(long, value_name = "HEX16")]
        hiding_key: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Recover the cover image using only the private key
    Decrypt {
        #[arg(long, value_name = "PST")]
        stego: PathBuf,
        #[arg(long, value_name = "FILE")]
        privkey: PathBuf,
        #[arg(long, value_name = "PGM")]
        out: PathBuf,
    },
    /// Compare two grayscale images
    Psnr { a: PathBuf, b: PathBuf },
    /// Count Montgomery multiplications for simultaneous vs. sequential exponentiation
    Bench {
        #[arg(long)]
        bits: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Paillier(#[from] PaillierError),
    #[error("{0}")]
    Stego(#[from] StegoError),
    #[error("{0}")]
    Image(#[from] ImageIoError),
    #[error("{0}")]
    Metrics(#[from] MetricsError),
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read(path)?;
    String::from_utf8(bytes)
        .map_err(|_| CliError::Paillier(PaillierError::KeyFormat("not UTF-8".into())))
}

fn staging_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(format!(".tmp-{}", std::process::id()));
    path.with_file_name(name)
}

/// Writes every output or none: all files are staged first and renamed into
/// place only once each has been written.
fn write_all(outputs: &[(&Path, Vec<u8>)]) -> Result<(), CliError> {
    let mut staged: Vec<(PathBuf, &Path)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, &Path)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (path, bytes) in outputs {
        let tmp = staging_path(path);
        if let Err(source) = fs::write(&tmp, bytes) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged);
            return Err(CliError::Write {
                path: path.to_path_buf(),
                source,
            });
        }
        staged.push((tmp, path));
    }
    for (i, (tmp, path)) in staged.iter().enumerate() {
        if let Err(source) = fs::rename(tmp, path) {
            for (_, done) in &staged[..i] {
                let _ = fs::remove_file(done);
            }
            cleanup(&staged[i..]);
            return Err(CliError::Write {
                path: path.to_path_buf(),
                source,
            });
        }
    }
    Ok(())
}

fn randomness(seed: Option<u64>) -> Box<dyn RngCore> {
    match seed {
        Some(s) => Box::new(SplitMix64::new(s)),
        None => Box::new(StdRng::from_os_rng()),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn render_png_bytes(render: &image_io::RgbRender) -> Result<Vec<u8>, CliError> {
    let buf = image::RgbImage::from_raw(render.width, render.height, render.data.clone())
        .ok_or(ImageIoError::BadRender)?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| ImageIoError::Png(e.to_string()))?;
    Ok(out.into_inner())
}

/// Executes one parsed command, returning the text to print on success.
pub fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Keygen {
            bits,
            out,
            random_g,
            seed,
        } => {
            let mode = if random_g {
                GeneratorMode::Random
            } else {
                GeneratorMode::NPlusOne
            };
            let (pk, sk) = paillier::keygen(bits, mode, &mut *randomness(seed))?;
            let pub_path = with_suffix(&out, ".pub");
            let priv_path = with_suffix(&out, ".priv");
            write_all(&[
                (&pub_path, pk.to_text().into_bytes()),
                (&priv_path, sk.to_text().into_bytes()),
            ])?;
            Ok(format!(
                "n_bits={} pub={} priv={}",
                pk.n().bits(),
                pub_path.display(),
                priv_path.display()
            ))
        }
        Command::Embed {
            cover,
            payload,
            pubkey,
            hiding_key,
            out,
            render,
            seed,
        } => {
            let key: HidingKey = hiding_key.parse()?;
            let cover = image_io::decode_pgm(&read(&cover)?)?;
            let payload = Payload::from_bytes(read(&payload)?);
            let pk = paillier::parse_public_key(&read_text(&pubkey)?)?;
            let stego = stego::embed(&cover, &payload, &pk, key, &mut *randomness(seed))?;

            let mut outputs = vec![(out.as_path(), image_io::encode_container(&stego))];
            if let Some(png) = render.as_deref() {
                let rgb = image_io::render_rgb(&stego)?;
                outputs.push((png, render_png_bytes(&rgb)?));
            }
            write_all(&outputs)?;
            Ok(format!(
                "payload_bits={} framed_bits={} capacity_bits={} bpp={}",
                payload.bit_len(),
                payload.framed_bits(),
                cover.capacity_bits(),
                metrics::embedding_rate(cover.capacity_bits(), cover.pixel_count())
            ))
        }
        Command::Extract {
            stego,
            hiding_key,
            out,
        } => {
            let key: HidingKey = hiding_key.parse()?;
            let carrier = image_io::decode_container(&read(&stego)?)?;
            let payload = stego::extract(&carrier, key)?;
            let bits = payload.bit_len();
            write_all(&[(&out, payload.into_bytes())])?;
            Ok(format!("extracted_bits={bits}"))
        }
        Command::Decrypt {
            stego,
            privkey,
            out,
        } => {
            let carrier = image_io::decode_container(&read(&stego)?)?;
            let sk = paillier::parse_private_key(&read_text(&privkey)?)?;
            let cover = stego::decrypt_reconstruct(&carrier, &sk)?;
            write_all(&[(&out, image_io::encode_pgm(&cover))])?;
            Ok(format!("width={} height={}", cover.width(), cover.height()))
        }
        Command::Psnr { a, b } => {
            let a = image_io::decode_pgm(&read(&a)?)?;
            let b = image_io::decode_pgm(&read(&b)?)?;
            Ok(metrics::psnr(&a, &b)?.to_string())
        }
        Command::Bench { bits, trials, seed } => {
            let report = metrics::bench_exponentiation(bits, trials, &mut SplitMix64::new(seed))?;
            Ok(report.to_string())
        }
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(summary) => {
            let _ = writeln!(std::io::stdout(), "{summary}");
            EXIT_OK
        }
        Err(err) => {
            let _ = writeln!(std::io::stderr(), "error: {err}");
            EXIT_FAILURE
        }
    }
}
