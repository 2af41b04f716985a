//! Scalar abstractions.
//!
//! The parameter algebra of reduced density matrices is written once against
//! [`Scalar`] and instantiated with exact rationals (`BigRational`) for basis
//! states or with floats for superpositions. Dense linear algebra needs
//! square roots and is written against [`Real`].

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// A field element usable for exact or approximate parameter arithmetic.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    fn from_rational(r: &BigRational) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_count(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Floating-point scalar for dense linear algebra.
pub trait Real: Scalar + Float + Copy + Default + 'static {
    /// Convert an f64 constant (tolerances, literals).
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {}
impl Real for f32 {}
