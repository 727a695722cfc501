//! Solution tables, the characteristic function, eigenvalues, weight numbers
//! and the Weyl function of a [`BoundaryProblem`].

pub mod eigen;
pub mod ode;
pub mod weights;

pub use eigen::{find_eigenvalues, find_eigenvalues_with, EigenOptions, TAU_SIMPLE};
pub use ode::{solve_ivp, Anchor, SolutionTable, OVERFLOW_GUARD};
pub use weights::{cluster_moments, weight_numbers, weyl_function, TAU_POLE};

use crate::error::Result;
use crate::problem::BoundaryProblem;
use crate::real::{cr, Real, C};

/// `φ(x, λ)` with `φ(0) = 1`, `φ^[1](0) = 0`.
pub fn phi_table<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<SolutionTable<T>> {
    problem.propagator().table(lambda, Anchor::Left, cr(T::one()), cr(T::zero()))
}

/// `ψ(x, λ)` with `ψ(π) = r₁(λ)`, `ψ^[1](π) = -r₂(λ)`.
pub fn psi_table<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<SolutionTable<T>> {
    let p = problem.polys();
    problem.propagator().table(lambda, Anchor::Right, p.eval_r1(lambda), -p.eval_r2(lambda))
}

/// `Δ(λ) = r₁(λ) φ^[1](π, λ) + r₂(λ) φ(π, λ)`.
pub fn characteristic<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<C<T>> {
    let (y, yq) = problem.propagator().shoot(lambda, cr(T::one()), cr(T::zero()))?;
    let p = problem.polys();
    Ok(p.eval_r1(lambda) * yq + p.eval_r2(lambda) * y)
}

/// `Δ(λ) = -ψ^[1](0, λ)`, integrating backward from `π`.
pub fn characteristic_backward<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<C<T>> {
    let p = problem.polys();
    let (_, yq) = problem.propagator().shoot_back(lambda, p.eval_r1(lambda), -p.eval_r2(lambda))?;
    Ok(-yq)
}

/// `Δ(λ)` and `dΔ/dλ`, the latter differentiated through the discrete scheme.
pub fn characteristic_with_derivative<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<(C<T>, C<T>)> {
    let [y, yq, dy, dyq] = problem.propagator().shoot_with_derivative(lambda, cr(T::one()), cr(T::zero()))?;
    let p = problem.polys();
    let (r1, r2) = (p.eval_r1(lambda), p.eval_r2(lambda));
    let (dr1, dr2) = (p.eval_r1_derivative(lambda), p.eval_r2_derivative(lambda));
    Ok((r1 * yq + r2 * y, dr1 * yq + r1 * dyq + dr2 * y + r2 * dy))
}
