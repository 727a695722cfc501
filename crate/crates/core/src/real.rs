//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `tol`, but never below `ulps` machine epsilons of `T`.
#[inline]
pub(crate) fn tol<T: Real>(tol: f64, ulps: f64) -> T {
    T::of(tol).max(T::epsilon() * T::of(ulps))
}

/// Principal square root with the branch fixed so that `Re ρ ≥ 0`, and
/// `Im ρ ≥ 0` whenever `Re ρ = 0`.
pub fn principal_sqrt<T: Real>(z: C<T>) -> C<T> {
    let mut r = z.sqrt();
    if r.re < T::zero() || (r.re == T::zero() && r.im < T::zero()) {
        r = -r;
    }
    r
}

pub(crate) fn is_finite<T: Real>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_branch() {
        let r = principal_sqrt(Complex::new(-1.0_f64, 0.0));
        assert_eq!(r, Complex::new(0.0, 1.0));
        let r = principal_sqrt(Complex::new(4.0_f64, -0.0));
        assert!((r - Complex::new(2.0, 0.0)).norm() < 1e-15);
        let r = principal_sqrt(Complex::new(-4.0_f64, -1e-300));
        assert!(r.re >= 0.0);
    }
}
