//! Scalar abstractions.
//!
//! [`Weight`] covers anything usable as a vertex weight or Hamiltonian
//! coefficient, exact rationals included. [`Real`] is the floating-point
//! field used by eigensolvers and time evolution.

use std::fmt;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Ordered numeric field element: exact (`Ratio<i64>`) or floating.
pub trait Weight:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in weight type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl<T> Weight for T where
    T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: nalgebra::RealField + Weight + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `F`.
#[inline]
pub fn lit<F: Real>(x: f64) -> F {
    nalgebra::convert(x)
}

/// Converts `F` into `f64`.
#[inline]
pub fn to_f64<F: Real>(x: F) -> f64 {
    num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

/// Converts an arbitrary weight into `F` through `f64`.
#[inline]
pub fn weight_to_real<W: Weight, F: Real>(w: &W) -> F {
    lit(w.to_f64_lossy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn rational_weights_convert_exactly_when_dyadic() {
        let w = Rational::new(5, 4);
        assert_eq!(weight_to_real::<_, f64>(&w), 1.25);
        assert_eq!(Rational::from_count(3), Rational::from_integer(3));
        assert!(Rational::new(1, 7).is_positive());
        assert_eq!(Rational::min_of(&Rational::new(1, 2), &Rational::new(1, 3)), Rational::new(1, 3));
    }

    #[test]
    fn literals_round_trip() {
        assert_eq!(to_f64(lit::<f32>(0.5)), 0.5);
        assert_eq!(lit::<f64>(2.0), 2.0);
    }
}
