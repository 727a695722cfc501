//! Forward and inverse Sturm–Liouville problems with a singular potential
//! and polynomials of the spectral parameter in the boundary condition.
//!
//! The equation is `-(y^[1])' - σ y^[1] - σ² y = λ y` on `(0, π)` with the
//! quasi-derivative `y^[1] = y' - σ y`, boundary conditions
//! `y^[1](0) = 0` and `r₁(λ) y^[1](π) + r₂(λ) y(π) = 0`.
//!
//! All solvers are generic over the working scalar ([`Real`], implemented for
//! `f32` and `f64`). The `*64` aliases at the crate root fix the scalar to `f64`.

// `!(a <= b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod forward;
pub mod grid;
pub mod inverse;
pub mod linalg;
pub mod poly;
pub mod problem;
pub mod quad;
pub mod real;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Grid, SampledFunction, DEFAULT_INTERVALS};
pub use poly::{make_polynomial_pair, make_polynomial_pair_unchecked, poly_derivative, poly_eval, PolynomialPair};
pub use problem::{BoundaryProblem, SpectralData};
pub use quad::integrate_product;
pub use real::{principal_sqrt, Real, C};

pub use num_complex::Complex64;

pub type Grid64 = Grid<f64>;
pub type SampledFunction64 = SampledFunction<f64>;
pub type PolynomialPair64 = PolynomialPair<f64>;
pub type BoundaryProblem64 = BoundaryProblem<f64>;
pub type SpectralData64 = SpectralData<f64>;
