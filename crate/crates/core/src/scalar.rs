//! Scalar abstraction so the whole library runs at either precision.
//!
//! All numerics are generic over [`Scalar`], implemented for `f32` and
//! `f64`. Concrete aliases (`StateVector64`, ...) live at the crate root.
//! Validation tolerances are part of the trait because a tolerance that is
//! meaningful at one precision is below machine epsilon at the other; the
//! documented contract values are the `f64` ones.

use std::fmt::Display;
use std::iter::Sum;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

pub trait Scalar:
    RealField
    + Copy
    + Default
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Tolerance for unit norms and hermiticity checks (1e-12 at f64).
    fn unit_tol() -> Self;
    /// Tolerance on imaginary parts of quantities that must be real (1e-10 at f64).
    fn real_tol() -> Self;
    /// Pauli coefficients smaller than this are stored as exact zeros (1e-14 at f64).
    fn coeff_zero_tol() -> Self;
    /// Squared-norm threshold below which a conditional branch counts as
    /// unpopulated (1e-24 at f64).
    fn branch_zero_tol() -> Self;

    fn cst(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {
    fn unit_tol() -> Self {
        1e-12
    }
    fn real_tol() -> Self {
        1e-10
    }
    fn coeff_zero_tol() -> Self {
        1e-14
    }
    fn branch_zero_tol() -> Self {
        1e-24
    }
}

impl Scalar for f32 {
    fn unit_tol() -> Self {
        1e-5
    }
    fn real_tol() -> Self {
        1e-4
    }
    fn coeff_zero_tol() -> Self {
        1e-6
    }
    fn branch_zero_tol() -> Self {
        1e-12
    }
}

/// Complex number over the library scalar.
pub type C<T> = Complex<T>;

pub(crate) fn c_zero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn c_re<T: Scalar>(v: T) -> C<T> {
    Complex::new(v, T::zero())
}

/// |z| for the generic complex type (num_complex's `norm` needs `Float`).
pub(crate) fn c_norm<T: Scalar>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_convert() {
        assert_eq!(<f64 as Scalar>::cst(0.25), 0.25);
        assert_eq!(<f32 as Scalar>::cst(0.25), 0.25f32);
        assert_eq!(1.5f64.as_f64(), 1.5);
    }
}
