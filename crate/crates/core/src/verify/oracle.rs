use crate::error::{Error, Result};
use crate::forward::weyl_function;
use crate::problem::BoundaryProblem;
use crate::real::{cx, Real, C};

pub const CONTOUR_NODES: usize = 64;

/// `α_n = Res_{λ=λ_n} M(λ)` by the trapezoid rule on a circle of radius
/// `min(gap, 1)/2`, where `gap` is the distance to the nearest other entry of
/// `lambdas`.
pub fn residue_alpha_oracle<T: Real>(problem: &BoundaryProblem<T>, lambdas: &[C<T>], index: usize) -> Result<C<T>> {
    let center = *lambdas
        .get(index)
        .ok_or_else(|| Error::InvalidInput(format!("index {index} outside {} eigenvalues", lambdas.len())))?;
    let gap = lambdas
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, l)| (l - center).norm())
        .fold(T::infinity(), T::min);
    let radius = gap.min(T::one()) * T::of(0.5);
    if radius < T::of(1e-6) {
        return Err(Error::NearbyEigenvalue(radius.to_f64().unwrap_or(0.0)));
    }
    // (1/2πi) ∮ M dλ = mean over nodes of M(z)(z - c)
    let mut acc = cx(T::zero(), T::zero());
    for k in 0..CONTOUR_NODES {
        let t = T::TAU() * T::of_usize(k) / T::of_usize(CONTOUR_NODES);
        let w = cx(radius * t.cos(), radius * t.sin());
        acc = acc + weyl_function(problem, center + w)? * w;
    }
    Ok(acc / T::of_usize(CONTOUR_NODES))
}
