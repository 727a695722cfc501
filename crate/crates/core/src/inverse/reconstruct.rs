use super::tables::ModelTables;
use crate::error::{Error, Result};
use crate::forward::ode::Propagator;
use crate::grid::SampledFunction;
use crate::linalg::{least_squares, Matrix};
use crate::poly::{poly_eval, PolynomialPair};
use crate::problem::SpectralData;
use crate::real::{cr, cx, Real, C};

/// Relative residual accepted by [`extract_polynomial`].
pub const TAU_POLY: f64 = 1e-6;

/// Coefficients (constant term first) and the relative residual
/// `max_s |p(λ_s) - v_s| / (1 + max_s |v_s|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFit<T: Real> {
    pub coeffs: Vec<C<T>>,
    pub residual: T,
}

/// Least-squares fit of a polynomial of degree `≤ degree_cap` (exactly
/// `degree_cap` with leading coefficient 1 when `monic`).
pub fn extract_polynomial<T: Real>(
    points: &[C<T>],
    values: &[C<T>],
    degree_cap: usize,
    monic: bool,
) -> Result<PolynomialFit<T>> {
    if points.len() != values.len() {
        return Err(Error::InvalidInput("sample points and values differ in length".into()));
    }
    if points.len() < degree_cap + 3 {
        return Err(Error::InvalidInput(format!("{} samples for degree {degree_cap}", points.len())));
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].iter().any(|b| (a - b).norm() == T::zero()) {
            return Err(Error::InvalidInput("repeated sample point".into()));
        }
    }
    let free = if monic { degree_cap } else { degree_cap + 1 };
    let target: Vec<C<T>> = if monic {
        points.iter().zip(values).map(|(p, v)| v - p.powu(degree_cap as u32)).collect()
    } else {
        values.to_vec()
    };
    let mut coeffs = if free == 0 {
        Vec::new()
    } else {
        let mut a = Matrix::zeros(points.len(), free);
        for (i, p) in points.iter().enumerate() {
            let mut pw = cr(T::one());
            for j in 0..free {
                a[(i, j)] = pw;
                pw = pw * p;
            }
        }
        least_squares(&a, &target)
    };
    if monic {
        coeffs.push(cr(T::one()));
    }
    let scale = T::one() + values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let residual =
        points.iter().zip(values).map(|(p, v)| (poly_eval(&coeffs, *p) - v).norm()).fold(T::zero(), T::max) / scale;
    if !(residual <= T::of(TAU_POLY)) {
        return Err(Error::ExtractionResidual { degree: degree_cap, residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(PolynomialFit { coeffs, residual })
}

/// `λ_s = iξ(1 + s)`, `s = 0..=M₁+4`, with `ξ ≥ 1` grown until every sample
/// is at distance `≥ 1` from all `λ_{kj}` in the tables.
pub fn sample_points<T: Real>(tables: &ModelTables<T>, m1: usize) -> Vec<C<T>> {
    let count = m1 + 5;
    let mut xi = T::one();
    loop {
        let pts: Vec<C<T>> = (0..count).map(|s| cx(T::zero(), xi * T::of_usize(s + 1))).collect();
        let ok =
            pts.iter().all(|z| (0..tables.len()).all(|p| (0..2).all(|j| (z - tables.lambda(p, j)).norm() >= T::one())));
        if ok {
            return pts;
        }
        xi = xi * T::of(1.5);
    }
}

/// `σ^K(x) = σ̃(x) - 2 Σ_k Σ_j (-1)^j α_{kj} (φ̃_{kj}(x) φ_{kj}(x) - 1/2)`, with
/// `recovered[2p + j][x]` the main-equation solutions.
pub fn reconstruct_sigma<T: Real>(
    model_sigma: &SampledFunction<T>,
    tables: &ModelTables<T>,
    recovered: &[Vec<C<T>>],
) -> Result<SampledFunction<T>> {
    if recovered.len() != 2 * tables.len() {
        return Err(Error::InvalidInput("recovered table does not match the model tables".into()));
    }
    let half = T::of(0.5);
    let two = T::of(2.0);
    let values = model_sigma
        .values()
        .iter()
        .enumerate()
        .map(|(x, s)| {
            let mut acc = cr(T::zero());
            for p in 0..tables.len() {
                let t0 = tables.alpha(p, 0) * (tables.phi(p, 0)[x] * recovered[2 * p][x] - half);
                let t1 = tables.alpha(p, 1) * (tables.phi(p, 1)[x] * recovered[2 * p + 1][x] - half);
                acc = acc + t0 - t1;
            }
            s - acc * two
        })
        .collect();
    SampledFunction::new(model_sigma.grid().clone(), values)
}

/// `Π_K(λ) = ∏_{k ≤ K} (λ - λ_{k0})/(λ - λ_{k1})` over the first `k` entries.
pub fn product_pi<T: Real>(target: &SpectralData<T>, model: &SpectralData<T>, k: usize, lambda: C<T>) -> Result<C<T>> {
    if k > target.count() || k > model.count() {
        return Err(Error::InvalidInput(format!("product over {k} entries exceeds the data")));
    }
    let pairs: Vec<[C<T>; 2]> = (0..k).map(|i| [target.lambda()[i], model.lambda()[i]]).collect();
    product_over(&pairs, lambda)
}

fn product_over<T: Real>(pairs: &[[C<T>; 2]], lambda: C<T>) -> Result<C<T>> {
    let mut acc = cr(T::one());
    for [l0, l1] in pairs {
        if l0 == l1 {
            continue;
        }
        let den = lambda - l1;
        if den.norm() < T::of(crate::forward::TAU_POLE) {
            return Err(Error::NearPole(format!("{lambda}")));
        }
        acc = acc * (lambda - l0) / den;
    }
    Ok(acc)
}

fn active_pairs<T: Real>(tables: &ModelTables<T>) -> Vec<[C<T>; 2]> {
    (0..tables.len()).map(|p| [tables.lambda(p, 0), tables.lambda(p, 1)]).collect()
}

/// Boundary factor `r̃₁(λ) φ̃^[1]_{kj}(π) + r̃₂(λ) φ̃_{kj}(π)` for column `a`.
fn boundary_factor<T: Real>(model: &PolynomialPair<T>, tables: &ModelTables<T>, a: usize, lambda: C<T>) -> C<T> {
    let (p, j) = (a / 2, a % 2);
    let last = tables.grid().intervals();
    model.eval_r1(lambda) * tables.phi_quasi(p, j)[last] + model.eval_r2(lambda) * tables.phi(p, j)[last]
}

fn sign<T: Real>(a: usize) -> T {
    if a.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// Samples `r₁^K(λ) = Π_K(λ)(r̃₁(λ) - S_K(λ))` at `points` and extracts the
/// monic polynomial of degree `M₁`. `phi_pi[2p + j]` are the recovered `φ_{kj}(π)`.
pub fn reconstruct_r1<T: Real>(
    model: &PolynomialPair<T>,
    tables: &ModelTables<T>,
    phi_pi: &[C<T>],
    points: &[C<T>],
) -> Result<PolynomialFit<T>> {
    let pairs = active_pairs(tables);
    let mut values = Vec::with_capacity(points.len());
    for &z in points {
        let mut s = cr(T::zero());
        for (a, phi) in phi_pi.iter().enumerate() {
            let (p, j) = (a / 2, a % 2);
            let term = tables.alpha(p, j) * phi * boundary_factor(model, tables, a, z) / (z - tables.lambda(p, j));
            s = s + term * sign::<T>(a);
        }
        values.push(product_over(&pairs, z)? * (model.eval_r1(z) - s));
    }
    extract_polynomial(points, &values, model.degree(), true)
}

/// Samples `r₂^K(λ) = Π_K(λ)(r̃₂(λ) + U_K(λ))` and extracts a polynomial of
/// degree `≤ M₁`. The quasi-derivatives `φ^{K[1]}_{kj}(π)` come from
/// re-solving the equation with potential `σ^K`.
pub fn reconstruct_r2<T: Real>(
    model: &PolynomialPair<T>,
    tables: &ModelTables<T>,
    sigma_k: &SampledFunction<T>,
    phi_pi: &[C<T>],
    points: &[C<T>],
) -> Result<PolynomialFit<T>> {
    let prop = Propagator::new(sigma_k);
    let last = tables.grid().intervals();
    let mut quasi = Vec::with_capacity(phi_pi.len());
    for a in 0..phi_pi.len() {
        let (_, q) = prop.shoot(tables.lambda(a / 2, a % 2), cr(T::one()), cr(T::zero()))?;
        quasi.push(q);
    }
    // Σ (-1)^j α_{kj} (φ̃_{kj}(π) φ_{kj}(π) - 1)
    let mut base = cr(T::zero());
    for (a, phi) in phi_pi.iter().enumerate() {
        let (p, j) = (a / 2, a % 2);
        base = base + tables.alpha(p, j) * (tables.phi(p, j)[last] * phi - T::one()) * sign::<T>(a);
    }
    let pairs = active_pairs(tables);
    let mut values = Vec::with_capacity(points.len());
    for &z in points {
        let mut u = -model.eval_r1(z) * base;
        for (a, q) in quasi.iter().enumerate() {
            let (p, j) = (a / 2, a % 2);
            let term = tables.alpha(p, j) * q * boundary_factor(model, tables, a, z) / (z - tables.lambda(p, j));
            u = u + term * sign::<T>(a);
        }
        values.push(product_over(&pairs, z)? * (model.eval_r2(z) + u));
    }
    extract_polynomial(points, &values, model.degree(), false)
}
