use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Sign of an exactly represented real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Element of the field generated by the rationals, `i` and `sqrt2`,
/// stored as `a + b*sqrt2 + (c + d*sqrt2)*i` with reduced rational
/// coefficients.
///
/// The representation is canonical (num keeps each ratio in lowest terms with
/// a positive denominator), so structural equality is field equality and the
/// zero test is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ExactScalar {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        ExactScalar { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        ExactScalar::new(
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
            BigRational::zero(),
        )
    }

    pub fn sqrt2() -> Self {
        ExactScalar::new(
            BigRational::zero(),
            BigRational::one(),
            BigRational::zero(),
            BigRational::zero(),
        )
    }

    pub fn from_integer(n: i64) -> Self {
        ExactScalar::new(
            BigRational::from_integer(BigInt::from(n)),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        )
    }

    /// Rational `n/d`. Panics if `d == 0`; intended for literal constants.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        ExactScalar::new(rat(n, d), BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar::new(r, BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn coeff_a(&self) -> &BigRational {
        &self.a
    }

    pub fn coeff_b(&self) -> &BigRational {
        &self.b
    }

    pub fn coeff_c(&self) -> &BigRational {
        &self.c
    }

    pub fn coeff_d(&self) -> &BigRational {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// True when the imaginary coefficients vanish.
    pub fn is_real(&self) -> bool {
        self.c.is_zero() && self.d.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactScalar::new(self.a.clone(), self.b.clone(), -self.c.clone(), -self.d.clone())
    }

    /// Real part `a + b*sqrt2` as a scalar.
    pub fn re(&self) -> Self {
        ExactScalar::new(self.a.clone(), self.b.clone(), BigRational::zero(), BigRational::zero())
    }

    /// Imaginary part `c + d*sqrt2` as a real scalar.
    pub fn im(&self) -> Self {
        ExactScalar::new(self.c.clone(), self.d.clone(), BigRational::zero(), BigRational::zero())
    }

    /// Exact sign of a real element `a + b*sqrt2`.
    ///
    /// Errors on non-real input. The mixed-sign case is decided by comparing
    /// `a^2` against `2 b^2`, which never ties for nonzero rationals because
    /// `sqrt2` is irrational.
    pub fn real_sign(&self) -> Result<Sign> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        let (a, b) = (&self.a, &self.b);
        let sign = if a.is_zero() && b.is_zero() {
            Sign::Zero
        } else if !a.is_negative() && !b.is_negative() {
            Sign::Positive
        } else if !a.is_positive() && !b.is_positive() {
            Sign::Negative
        } else {
            // exactly one of a, b is negative
            let t = a * a - rat(2, 1) * b * b; // sign of (a - |b|sqrt2)(a + |b|sqrt2)
            let t_pos = t.is_positive();
            if a.is_positive() {
                if t_pos {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            } else if t_pos {
                Sign::Negative
            } else {
                Sign::Positive
            }
        };
        Ok(sign)
    }

    /// Exact ordering of two real elements.
    pub fn real_cmp(&self, other: &Self) -> Result<std::cmp::Ordering> {
        use std::cmp::Ordering;
        let sign = (self - other).real_sign()?;
        Ok(match sign {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // |z|^2 = re^2 + im^2 lives in Q(sqrt2): (e, f) with e + f*sqrt2.
        let (re_a, re_b) = (&self.a, &self.b);
        let (im_a, im_b) = (&self.c, &self.d);
        let two = rat(2, 1);
        let e = re_a * re_a + &two * re_b * re_b + im_a * im_a + &two * im_b * im_b;
        let f = rat(2, 1) * (re_a * re_b + im_a * im_b);
        // (e + f*sqrt2)^-1 = (e - f*sqrt2) / (e^2 - 2 f^2)
        let g = &e * &e - two * &f * &f;
        debug_assert!(!g.is_zero());
        let p = &e / &g;
        let q = -(&f / &g);
        // conj(z) * (p + q*sqrt2)
        let z = self.conj();
        let mul_real_pair = |x: &BigRational, y: &BigRational| {
            (x * &p + rat(2, 1) * y * &q, x * &q + y * &p)
        };
        let (na, nb) = mul_real_pair(&z.a, &z.b);
        let (nc, nd) = mul_real_pair(&z.c, &z.d);
        Some(ExactScalar::new(na, nb, nc, nd))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.checked_inv().map(|inv| self * &inv)
    }

    pub fn to_complex64(&self) -> Complex64 {
        let r2 = std::f64::consts::SQRT_2;
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        Complex64::new(f(&self.a) + f(&self.b) * r2, f(&self.c) + f(&self.d) * r2)
    }
}

/// `conj(x) * y`, the primitive for Gram-style matrix entries.
pub fn conj_mul(x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
    &x.conj() * y
}

impl std::ops::Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.a.clone(), -self.b.clone(), -self.c.clone(), -self.d.clone())
    }
}

impl std::ops::Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.a + &rhs.a,
            &self.b + &rhs.b,
            &self.c + &rhs.c,
            &self.d + &rhs.d,
        )
    }
}

impl std::ops::Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.a - &rhs.a,
            &self.b - &rhs.b,
            &self.c - &rhs.c,
            &self.d - &rhs.d,
        )
    }
}

impl std::ops::Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        // complex multiplication over Q(sqrt2):
        // (xr + xi*i)(yr + yi*i) with each part a pair (p, q) ~ p + q*sqrt2
        let two = rat(2, 1);
        let pair_mul = |p1: &BigRational, q1: &BigRational, p2: &BigRational, q2: &BigRational| {
            (p1 * p2 + &two * q1 * q2, p1 * q2 + q1 * p2)
        };
        let (rr_p, rr_q) = pair_mul(&self.a, &self.b, &rhs.a, &rhs.b);
        let (ii_p, ii_q) = pair_mul(&self.c, &self.d, &rhs.c, &rhs.d);
        let (ri_p, ri_q) = pair_mul(&self.a, &self.b, &rhs.c, &rhs.d);
        let (ir_p, ir_q) = pair_mul(&self.c, &self.d, &rhs.a, &rhs.b);
        ExactScalar::new(rr_p - ii_p, rr_q - ii_q, ri_p + ir_p, ri_q + ir_q)
    }
}

macro_rules! forward_owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned_ops!(Add::add, Sub::sub, Mul::mul);

impl std::ops::Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}
