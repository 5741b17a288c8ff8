//! Scalar backends: exact elements of the field Q(i, sqrt2) and complex
//! doubles with a configurable relative tolerance.

mod exact;
mod parse;

pub use exact::{conj_mul, ExactScalar, Sign};
pub use parse::{parse_amplitude, render_exact};

use num::complex::Complex64;
use num::Zero;

/// Which arithmetic backs a scalar or a functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// A scalar tagged with its backend. All scalars inside one functional share
/// one backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(ExactScalar),
    Float(Complex64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Scalar {
        match backend {
            Backend::Exact => Scalar::Exact(ExactScalar::zero()),
            Backend::Float => Scalar::Float(Complex64::zero()),
        }
    }

    pub fn one(backend: Backend) -> Scalar {
        match backend {
            Backend::Exact => Scalar::Exact(ExactScalar::one()),
            Backend::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Real part, kept on the same backend.
    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.re()),
            Scalar::Float(z) => Scalar::Float(Complex64::new(z.re, 0.0)),
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(x) => x.to_complex64(),
            Scalar::Float(z) => *z,
        }
    }

    /// Report rendering: exact values in the literal grammar, floats in
    /// scientific notation with 12 significant digits.
    pub fn render(&self) -> String {
        match self {
            Scalar::Exact(x) => render_exact(x),
            Scalar::Float(z) => render_float(*z),
        }
    }
}

impl From<ExactScalar> for Scalar {
    fn from(x: ExactScalar) -> Scalar {
        Scalar::Exact(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Scalar {
        Scalar::Float(z)
    }
}

fn render_float(z: Complex64) -> String {
    let norm = |x: f64| if x == 0.0 { 0.0 } else { x };
    let re = norm(z.re);
    let im = norm(z.im);
    if im == 0.0 {
        format!("{re:.11e}")
    } else if im < 0.0 {
        format!("{re:.11e} - {:.11e}*i", -im)
    } else {
        format!("{re:.11e} + {im:.11e}*i")
    }
}

/// Ring operations shared by the two backends; lets the subset-scan and
/// matrix kernels be written once.
pub(crate) trait RingScalar: Clone + Send + Sync {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_mul(&self, o: &Self) -> Self;
    fn ring_conj(&self) -> Self;
    fn ring_add_assign(&mut self, o: &Self);
    fn ring_sub_assign(&mut self, o: &Self);
}

impl RingScalar for ExactScalar {
    fn ring_zero() -> Self {
        ExactScalar::zero()
    }
    fn ring_one() -> Self {
        ExactScalar::one()
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_conj(&self) -> Self {
        self.conj()
    }
    fn ring_add_assign(&mut self, o: &Self) {
        *self = &*self + o;
    }
    fn ring_sub_assign(&mut self, o: &Self) {
        *self = &*self - o;
    }
}

impl RingScalar for Complex64 {
    fn ring_zero() -> Self {
        Complex64::zero()
    }
    fn ring_one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_conj(&self) -> Self {
        self.conj()
    }
    fn ring_add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn ring_sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
}
