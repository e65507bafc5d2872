//! Python bindings: key management, Paillier operations, the Montgomery
//! context and the embed / extract / reconstruct pipeline.
//!
//! Big integers cross the boundary as Python `int`, images and payloads as
//! `bytes`.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};

use hestego::image_io;
use hestego::metrics::{self, Psnr};
use hestego::paillier;
use hestego::{BigNat, Ciphertext, GeneratorMode, GrayImage, HidingKey, Payload, SplitMix64};

create_exception!(hestego, HestegoError, PyValueError);

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    HestegoError::new_err(e.to_string())
}

fn nat(v: BigUint) -> BigNat {
    BigNat::from(v)
}

fn int(v: &BigNat) -> BigUint {
    v.as_biguint().clone()
}

fn rng_for(seed: Option<u64>) -> Box<dyn RngCore> {
    match seed {
        Some(s) => Box::new(SplitMix64::new(s)),
        None => Box::new(StdRng::from_os_rng()),
    }
}

#[pyclass(name = "MontCtx", module = "hestego", frozen)]
struct PyMontCtx(hestego::MontCtx);

#[pymethods]
impl PyMontCtx {
    #[new]
    fn new(modulus: BigUint) -> PyResult<Self> {
        hestego::MontCtx::new(&nat(modulus)).map(PyMontCtx).map_err(err)
    }

    #[getter]
    fn modulus(&self) -> BigUint {
        int(self.0.modulus())
    }

    #[getter]
    fn bit_len(&self) -> u64 {
        self.0.bit_len()
    }

    #[getter]
    fn r_mod_n(&self) -> BigUint {
        int(self.0.r_mod_n())
    }

    #[getter]
    fn r2_mod_n(&self) -> BigUint {
        int(self.0.r2_mod_n())
    }

    #[getter]
    fn n_prime(&self) -> u64 {
        self.0.n_prime()
    }

    fn mul_count(&self) -> u64 {
        self.0.mul_count()
    }

    fn to_domain(&self, x: BigUint) -> PyResult<BigUint> {
        self.0.to_domain(&nat(x)).map(|v| int(&v)).map_err(err)
    }

    fn from_domain(&self, x: BigUint) -> PyResult<BigUint> {
        self.0.from_domain(&nat(x)).map(|v| int(&v)).map_err(err)
    }

    fn mont_mul(&self, a: BigUint, b: BigUint) -> PyResult<BigUint> {
        self.0.mont_mul(&nat(a), &nat(b)).map(|v| int(&v)).map_err(err)
    }

    fn mont_exp(&self, g: BigUint, e: BigUint) -> PyResult<BigUint> {
        self.0.mont_exp(&nat(g), &nat(e)).map(|v| int(&v)).map_err(err)
    }

    fn mont_sim_exp(&self, g0: BigUint, g1: BigUint, e0: BigUint, e1: BigUint) -> PyResult<BigUint> {
        self.0
            .mont_sim_exp(&nat(g0), &nat(g1), &nat(e0), &nat(e1))
            .map(|v| int(&v))
            .map_err(err)
    }
}

#[pyclass(name = "PublicKey", module = "hestego", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPublicKey(paillier::PublicKey);

#[pymethods]
impl PyPublicKey {
    #[new]
    fn new(n: BigUint, g: BigUint) -> PyResult<Self> {
        paillier::PublicKey::new(nat(n), nat(g)).map(PyPublicKey).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        paillier::parse_public_key(text).map(PyPublicKey).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn n(&self) -> BigUint {
        int(self.0.n())
    }

    #[getter]
    fn g(&self) -> BigUint {
        int(self.0.g())
    }

    /// `g^m · r^n mod n²`; a randomizer is drawn when `r` is omitted.
    #[pyo3(signature = (m, r=None, seed=None))]
    fn encrypt(&self, m: BigUint, r: Option<BigUint>, seed: Option<u64>) -> PyResult<BigUint> {
        let m = nat(m);
        let c = match r {
            Some(r) => self.0.encrypt(&m, &nat(r)),
            None => self.0.encrypt_with(&m, &mut *rng_for(seed)),
        };
        c.map(|c| int(c.value())).map_err(err)
    }

    fn hom_add(&self, c1: BigUint, c2: BigUint) -> PyResult<BigUint> {
        self.0
            .hom_add(&Ciphertext::new(nat(c1)), &Ciphertext::new(nat(c2)))
            .map(|c| int(c.value()))
            .map_err(err)
    }

    fn hom_scalar(&self, c: BigUint, k: BigUint) -> PyResult<BigUint> {
        self.0
            .hom_scalar(&Ciphertext::new(nat(c)), &nat(k))
            .map(|c| int(c.value()))
            .map_err(err)
    }

    /// Montgomery multiplications performed over `n²` by this key so far.
    fn mul_count(&self) -> u64 {
        self.0.mont_ctx().mul_count()
    }
}

#[pyclass(name = "PrivateKey", module = "hestego", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPrivateKey(paillier::PrivateKey);

#[pymethods]
impl PyPrivateKey {
    #[new]
    fn new(n: BigUint, lambda_: BigUint, mu: BigUint) -> PyResult<Self> {
        paillier::PrivateKey::new(nat(n), nat(lambda_), nat(mu))
            .map(PyPrivateKey)
            .map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        paillier::parse_private_key(text).map(PyPrivateKey).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn n(&self) -> BigUint {
        int(self.0.n())
    }

    #[getter]
    fn lambda_(&self) -> BigUint {
        int(self.0.lambda())
    }

    #[getter]
    fn mu(&self) -> BigUint {
        int(self.0.mu())
    }

    fn decrypt(&self, c: BigUint) -> PyResult<BigUint> {
        self.0
            .decrypt(&Ciphertext::new(nat(c)))
            .map(|m| int(&m))
            .map_err(err)
    }
}

#[pyclass(name = "StegoImage", module = "hestego", frozen)]
struct PyStegoImage(hestego::StegoImage);

#[pymethods]
impl PyStegoImage {
    #[staticmethod]
    fn from_container(data: &[u8]) -> PyResult<Self> {
        image_io::decode_container(data).map(PyStegoImage).map_err(err)
    }

    fn to_container<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &image_io::encode_container(&self.0))
    }

    #[getter]
    fn width(&self) -> u32 {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.0.height()
    }

    #[getter]
    fn n(&self) -> BigUint {
        int(self.0.n())
    }

    /// Ciphertext pairs in row-major cover order.
    fn pairs(&self) -> Vec<(BigUint, BigUint)> {
        self.0
            .pairs()
            .iter()
            .map(|(a, b)| (int(a.value()), int(b.value())))
            .collect()
    }

    /// Returns `(width, height, rgb_bytes)` of the side-by-side RGB rendering.
    fn render_rgb<'py>(&self, py: Python<'py>) -> PyResult<(u32, u32, Bound<'py, PyBytes>)> {
        let r = image_io::render_rgb(&self.0).map_err(err)?;
        Ok((r.width, r.height, PyBytes::new(py, &r.data)))
    }

    #[staticmethod]
    fn derender_rgb(width: u32, height: u32, data: Vec<u8>, n: BigUint) -> PyResult<Self> {
        let render = image_io::RgbRender { width, height, data };
        image_io::derender_rgb(&render, &nat(n)).map(PyStegoImage).map_err(err)
    }

    /// Recovers the payload with the hiding key alone.
    fn extract<'py>(&self, py: Python<'py>, hiding_key: u64) -> PyResult<Bound<'py, PyBytes>> {
        let payload = hestego::extract(&self.0, HidingKey(hiding_key)).map_err(err)?;
        Ok(PyBytes::new(py, payload.as_bytes()))
    }

    /// Recovers the cover pixels with the private key alone.
    fn decrypt<'py>(&self, py: Python<'py>, sk: &PyPrivateKey) -> PyResult<Bound<'py, PyBytes>> {
        let img = hestego::decrypt_reconstruct(&self.0, &sk.0).map_err(err)?;
        Ok(PyBytes::new(py, img.samples()))
    }
}

#[pyfunction]
#[pyo3(signature = (bits, seed=None, random_g=false))]
fn keygen(bits: u64, seed: Option<u64>, random_g: bool) -> PyResult<(PyPublicKey, PyPrivateKey)> {
    let mode = if random_g {
        GeneratorMode::Random
    } else {
        GeneratorMode::NPlusOne
    };
    let (pk, sk) = hestego::keygen(bits, mode, &mut *rng_for(seed)).map_err(err)?;
    Ok((PyPublicKey(pk), PyPrivateKey(sk)))
}

#[pyfunction]
#[pyo3(signature = (p, q, g=None))]
fn keypair_from_primes(p: BigUint, q: BigUint, g: Option<BigUint>) -> PyResult<(PyPublicKey, PyPrivateKey)> {
    let (pk, sk) = hestego::keypair_from_primes(&nat(p), &nat(q), g.map(nat)).map_err(err)?;
    Ok((PyPublicKey(pk), PyPrivateKey(sk)))
}

#[pyfunction]
#[pyo3(signature = (width, height, pixels, payload, pk, hiding_key, seed=None))]
fn embed(
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    payload: Vec<u8>,
    pk: &PyPublicKey,
    hiding_key: u64,
    seed: Option<u64>,
) -> PyResult<PyStegoImage> {
    let cover = GrayImage::new(width, height, pixels).map_err(err)?;
    let payload = Payload::from_bytes(payload);
    hestego::embed(&cover, &payload, &pk.0, HidingKey(hiding_key), &mut *rng_for(seed))
        .map(PyStegoImage)
        .map_err(err)
}

#[pyfunction]
fn pixel_order(hiding_key: u64, count: usize) -> Vec<usize> {
    hestego::pixel_order(HidingKey(hiding_key), count)
}

#[pyfunction]
fn split_pixel(p: u8) -> (BigUint, BigUint) {
    let (a, b) = hestego::split_pixel(p);
    (int(&a), int(&b))
}

/// Returns `(mse, psnr_db)`; `psnr_db` is `None` for identical images.
#[pyfunction]
fn psnr(width: u32, height: u32, a: Vec<u8>, b: Vec<u8>) -> PyResult<(f64, Option<f64>)> {
    let a = GrayImage::new(width, height, a).map_err(err)?;
    let b = GrayImage::new(width, height, b).map_err(err)?;
    let r = metrics::psnr(&a, &b).map_err(err)?;
    let db = match r.psnr {
        Psnr::Lossless => None,
        Psnr::Db(db) => Some(db),
    };
    Ok((r.mse, db))
}

#[pyfunction]
fn throughput(input_bits: u64, frequency_hz: f64, cycles: u64) -> PyResult<f64> {
    metrics::throughput(input_bits, frequency_hz, cycles).map_err(err)
}

/// Returns the bench report as its `key=value` line.
#[pyfunction]
#[pyo3(signature = (bits, trials, seed=1))]
fn bench_exponentiation(bits: u64, trials: usize, seed: u64) -> PyResult<String> {
    metrics::bench_exponentiation(bits, trials, &mut SplitMix64::new(seed))
        .map(|r| r.to_string())
        .map_err(err)
}

#[pymodule]
#[pyo3(name = "hestego")]
fn hestego_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HestegoError", m.py().get_type::<HestegoError>())?;
    m.add_class::<PyMontCtx>()?;
    m.add_class::<PyPublicKey>()?;
    m.add_class::<PyPrivateKey>()?;
    m.add_class::<PyStegoImage>()?;
    m.add_function(wrap_pyfunction!(keygen, m)?)?;
    m.add_function(wrap_pyfunction!(keypair_from_primes, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(pixel_order, m)?)?;
    m.add_function(wrap_pyfunction!(split_pixel, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(throughput, m)?)?;
    m.add_function(wrap_pyfunction!(bench_exponentiation, m)?)?;
    Ok(())
}
