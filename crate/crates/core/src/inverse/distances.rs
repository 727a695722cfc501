use crate::error::{Error, Result};
use crate::problem::SpectralData;
use crate::real::Real;

/// `δ_n = |ρ_n - ρ̃_n| + |α_n - α̃_n|`, `χ_n = 1/δ_n` (0 when `δ_n = 0`) and
/// the `ℓ₂` norm `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSequences<T: Real> {
    pub delta_n: Vec<T>,
    pub chi_n: Vec<T>,
    pub delta: T,
}

/// Distances between target and model data. When the target declares an
/// unperturbed prefix `N`, the first `N` entries must agree.
pub fn distances<T: Real>(target: &SpectralData<T>, model: &SpectralData<T>) -> Result<DistanceSequences<T>> {
    if target.count() != model.count() {
        return Err(Error::CountMismatch { target: target.count(), model: model.count() });
    }
    if !target.has_weights() || !model.has_weights() {
        return Err(Error::InvalidInput("spectral data without weight numbers".into()));
    }
    let tol = T::of(1e-12);
    for i in 0..target.prefix() {
        let same =
            |a: num_complex::Complex<T>, b: num_complex::Complex<T>| (a - b).norm() <= tol * T::one().max(a.norm());
        if !same(target.lambda()[i], model.lambda()[i]) || !same(target.alpha()[i], model.alpha()[i]) {
            return Err(Error::PrefixMismatch(i + 1));
        }
    }
    let delta_n: Vec<T> = target
        .rho()
        .iter()
        .zip(model.rho())
        .zip(target.alpha().iter().zip(model.alpha()))
        .enumerate()
        .map(|(i, ((r, rm), (a, am)))| if i < target.prefix() { T::zero() } else { (r - rm).norm() + (a - am).norm() })
        .collect();
    let chi_n = delta_n.iter().map(|&d| if d == T::zero() { T::zero() } else { T::one() / d }).collect();
    let delta = delta_n.iter().map(|d| *d * *d).sum::<T>().sqrt();
    Ok(DistanceSequences { delta_n, chi_n, delta })
}
