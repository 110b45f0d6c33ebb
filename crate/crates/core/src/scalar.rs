//! The scalar field the algebra is built over.
//!
//! Everything combinatorial is generic over [`Scalar`]; eigenvalue problems
//! and the analytic layer are only provided for `Complex<f64>`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + for<'a> std::ops::AddAssign<&'a Self>
    + 'static
{
    fn conj(&self) -> Self;

    /// Nearest representable value of `re + i im`.
    fn from_parts(re: f64, im: f64) -> Self;

    /// Modulus, as a double (approximate for exact types).
    fn modulus(&self) -> f64;

    /// A random value of size roughly `scale`. Exact types draw from a coarse
    /// grid so products stay small.
    fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self;

    fn from_real(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            fn conj(&self) -> Self {
                Complex::conj(self)
            }
            fn from_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $t, im as $t)
            }
            fn modulus(&self) -> f64 {
                self.norm() as f64
            }
            fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                Complex::new((re * scale) as $t, (im * scale) as $t)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

impl Scalar for Complex<BigRational> {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_parts(re: f64, im: f64) -> Self {
        let cvt = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Complex::new(cvt(re), cvt(im))
    }
    fn modulus(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }
    fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
        // quarters in [-scale, scale]
        let top = (4.0 * scale).round().max(1.0) as i64;
        let mut draw = || BigRational::new(BigInt::from(rng.gen_range(-top..=top)), BigInt::from(4));
        let re = draw();
        let im = draw();
        Complex::new(re, im)
    }
}
