//! Operator-valued free and Boolean probability over `B = M_d(C)`.
//!
//! The combinatorial core (`balg`, `series`, `transforms`, `fock`) is generic
//! over the scalar field; [`C64`] is the production choice and
//! `Complex<BigRational>` gives exact arithmetic for small cases. Eigenvalue
//! based checks and the analytic layer work over `C64` only.

pub mod analytic;
pub mod balg;
pub mod error;
pub mod fock;
pub mod ncpart;
pub mod random;
pub mod scalar;
pub mod series;
pub mod transforms;
pub mod words;

pub use error::{Error, Result};
pub use scalar::Scalar;

use num_complex::Complex;
use num_rational::BigRational;

pub type C64 = Complex<f64>;
pub type CQ = Complex<BigRational>;

pub type Matrix = balg::AlgebraElement<C64>;
pub type Map = balg::LinearMap<C64>;
pub type Functional = balg::MultilinearFunctional<C64>;
pub type WordMap = balg::PolyLinearMap<C64>;
pub type Series = series::BSeries<C64>;
pub type Dist = transforms::Distribution<C64>;
pub type DistSpec = transforms::DistributionSpec<C64>;

pub type ExactMatrix = balg::AlgebraElement<CQ>;
pub type ExactSeries = series::BSeries<CQ>;
