//! Reconstruction of `(σ, r₁, r₂)` from spectral data by solving the main
//! equation `ψ̃(x) = (E + H̃(x)) ψ(x)` at every grid point against a model
//! problem, followed by the series formulas for `σ`, `r₁`, `r₂`.

mod distances;
mod reconstruct;
mod solve;
mod system;
mod tables;

pub use distances::{distances, DistanceSequences};
pub use reconstruct::{
    extract_polynomial, product_pi, reconstruct_r1, reconstruct_r2, reconstruct_sigma, sample_points, PolynomialFit,
    TAU_POLY,
};
pub use solve::{inverse_solve, Diagnostics, InverseOptions, ReconstructionResult, DEFAULT_TRUNCATION};
pub use system::{build_main_equation, solve_main_equation, MainEquationSolution, MainEquationSystem, TAU_CONDITION};
pub use tables::{kernel_d, ModelTables};
