//! Scalar abstraction shared by the numerical modules.
//!
//! Everything that only needs field arithmetic, square roots and
//! transcendental functions is written against [`Real`], so the same code
//! runs in `f32` and `f64`. Physical-unit bookkeeping (capacitances, SI
//! constants) and the Monte Carlo samplers stay in `f64`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by the Hilbert-space core.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::LowerExp {
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite literal")
    }

    /// Converts back to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon of this type.
    fn epsilon() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Complex scalar over a [`Real`].
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Cplx<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// `exp(-i phi)`.
#[inline]
pub(crate) fn phase<T: Real>(phi: T) -> Cplx<T> {
    Complex::new(phi.cos(), -phi.sin())
}
