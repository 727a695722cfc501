//! Weight numbers and the Weyl function.

use super::{characteristic_with_derivative, phi_table};
use crate::error::{Error, Result};
use crate::problem::{BoundaryProblem, SpectralData};
use crate::quad::integrate_product_corrected;
use crate::real::{cr, cx, Real, C};

/// Relative distance `|Δ/Δ'|` below which `λ` counts as sitting on a pole.
pub const TAU_POLE: f64 = 1e-6;

/// Fills in the weight numbers of `data`.
///
/// For a simple eigenvalue
/// `1/α_n = ∫₀^π φ² dx - φ(π)/r₁(λ_n) · (r₁'(λ_n) φ^[1](π) + r₂'(λ_n) φ(π))`.
/// A multiple eigenvalue gets the generalized coefficients
/// `α_{k+j} = (1/2πi) ∮ M(λ) (λ - λ_k)^j dλ` from a contour integral.
pub fn weight_numbers<T: Real>(problem: &BoundaryProblem<T>, data: &SpectralData<T>) -> Result<SpectralData<T>> {
    let lambdas = data.lambda();
    let mult = data.multiplicity();
    let mut alpha = Vec::with_capacity(lambdas.len());
    let mut i = 0;
    while i < lambdas.len() {
        let p = mult[i];
        if p == 1 {
            alpha.push(simple_weight(problem, lambdas[i])?);
        } else {
            let gap = lambdas
                .iter()
                .filter(|&&z| z != lambdas[i])
                .map(|z| (z - lambdas[i]).norm())
                .fold(T::infinity(), T::min);
            let radius = (gap * T::of(0.5)).min(T::of(0.5));
            let moments = weyl_moments(problem, lambdas[i], radius, p)?;
            alpha.extend(moments);
        }
        i += p;
    }
    Ok(data.clone().with_weights(alpha))
}

fn simple_weight<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<C<T>> {
    let table = phi_table(problem, lambda)?;
    let y = table.y.values();
    let yq = table.y_quasi.values();
    let sigma = problem.sigma().values();
    let dy: Vec<C<T>> = y.iter().zip(yq).zip(sigma).map(|((y, q), s)| q + s * y).collect();
    let grid = problem.grid();
    let m = grid.intervals();
    let integral = integrate_product_corrected(y, &dy, y, &dy, grid.spacing(), m);

    let p = problem.polys();
    let r1 = p.eval_r1(lambda);
    let scale = T::one().max(lambda.norm().powi(p.degree() as i32));
    if r1.norm() < T::of(1e-10) * scale {
        return Err(Error::VanishingR1(format!("{lambda}")));
    }
    let (phi, phiq) = (y[m], yq[m]);
    let inv = integral - phi / r1 * (p.eval_r1_derivative(lambda) * phiq + p.eval_r2_derivative(lambda) * phi);
    if inv.norm() < T::of(1e-14) {
        return Err(Error::ZeroAlphaDenominator(format!("{lambda}")));
    }
    Ok(cr(T::one()) / inv)
}

/// `(1/2πi) ∮ M(λ) (λ - c)^j dλ` for `j = 0..count`, 64 nodes on `|λ - c| = radius`.
fn weyl_moments<T: Real>(problem: &BoundaryProblem<T>, center: C<T>, radius: T, count: usize) -> Result<Vec<C<T>>> {
    let nodes = 64;
    let mut out = vec![cr(T::zero()); count];
    for j in 0..nodes {
        let theta = T::TAU() * T::of_usize(j) / T::of_usize(nodes);
        let w = cx(radius * theta.cos(), radius * theta.sin());
        let m = weyl_unchecked(problem, center + w)?;
        let mut f = m * w;
        for o in out.iter_mut() {
            *o = *o + f;
            f = f * w;
        }
    }
    Ok(out.into_iter().map(|s| s / T::of_usize(nodes)).collect())
}

fn weyl_unchecked<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<C<T>> {
    let p = problem.polys();
    let (y0, _) = problem.propagator().shoot_back(lambda, p.eval_r1(lambda), -p.eval_r2(lambda))?;
    let d = super::characteristic(problem, lambda)?;
    Ok(-y0 / d)
}

/// `M(λ) = -ψ(0, λ)/Δ(λ)`.
pub fn weyl_function<T: Real>(problem: &BoundaryProblem<T>, lambda: C<T>) -> Result<C<T>> {
    let (d, dd) = characteristic_with_derivative(problem, lambda)?;
    if d.norm() <= T::of(TAU_POLE) * dd.norm() {
        return Err(Error::NearPole(format!("{lambda}")));
    }
    let p = problem.polys();
    let (y0, _) = problem.propagator().shoot_back(lambda, p.eval_r1(lambda), -p.eval_r2(lambda))?;
    Ok(-y0 / d)
}

/// Number of eigenvalues (with multiplicity) inside `|λ - center| < radius`
/// and their mean, from contour moments of `Δ'/Δ`.
pub fn cluster_moments<T: Real>(problem: &BoundaryProblem<T>, center: C<T>, radius: T) -> Result<(usize, C<T>)> {
    let s = super::eigen::cluster_power_sums(problem, center, radius, 1)?;
    let count = s[0].re.round().to_usize().unwrap_or(0);
    let mean = if count == 0 { center } else { center + s[1] / T::of_usize(count) };
    Ok((count, mean))
}
