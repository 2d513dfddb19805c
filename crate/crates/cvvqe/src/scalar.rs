//! Scalar abstraction: every state-space routine in this crate is generic
//! over a real floating-point type.

use num_complex::Complex;

/// Real scalar for phase-space and Fock-space math: `f32` or `f64`.
///
/// `nalgebra::RealField` supplies the transcendental functions and linear
/// algebra, `num_traits` the conversions needed to pin literal tolerances.
pub trait Real:
    nalgebra::RealField
    + num_traits::Num
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Copy
    + Send
    + Sync
    + std::fmt::Display
    + std::fmt::LowerExp
{
}

impl<T> Real for T where
    T: nalgebra::RealField
        + num_traits::Num
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + Copy
        + Send
        + Sync
        + std::fmt::Display
        + std::fmt::LowerExp
{
}

/// Convert an `f64` literal (tolerances, defaults) into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Complex number over the working scalar.
pub type C<T> = Complex<T>;

/// Complex zero.
#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Modulus of a complex value without requiring `num_traits::Float`.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
