use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::{find_eigenvalues_with, weight_numbers, EigenOptions};
use crate::inverse::{distances, inverse_solve, InverseOptions, ReconstructionResult};
use crate::poly::poly_eval;
use crate::problem::{BoundaryProblem, SpectralData};
use crate::real::{cr, cx, Real, C};

/// Radius of the disc on which polynomial errors are measured; by the
/// maximum principle the sup is attained on its boundary.
pub const SUP_RADIUS: f64 = 20.0;
const SUP_NODES: usize = 256;

/// Additive change of `ρ` and `α` at one zero-based entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift<T: Real> {
    pub index: usize,
    pub drho: C<T>,
    pub dalpha: C<T>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Perturbation<T: Real> {
    pub shifts: Vec<Shift<T>>,
}

impl<T: Real> Perturbation<T> {
    pub fn new(shifts: Vec<Shift<T>>) -> Self {
        Perturbation { shifts }
    }

    pub fn none() -> Self {
        Perturbation { shifts: Vec::new() }
    }

    /// Shift of `ρ` only.
    pub fn rho(index: usize, amount: T) -> Self {
        Self::new(vec![Shift { index, drho: cr(amount), dalpha: cr(T::zero()) }])
    }

    /// Shift of `α` only.
    pub fn alpha(index: usize, amount: T) -> Self {
        Self::new(vec![Shift { index, drho: cr(T::zero()), dalpha: cr(amount) }])
    }

    /// Random real shifts of `ρ` and `α` on entries `first..first + entries`,
    /// scaled to data distance `delta`, drawn from a ChaCha stream.
    pub fn random(seed: u64, first: usize, entries: usize, delta: T) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = Self::new(
            (first..first + entries)
                .map(|index| Shift {
                    index,
                    drho: cr(T::of(rng.gen_range(-1.0..1.0))),
                    dalpha: cr(T::of(rng.gen_range(-1.0..1.0))),
                })
                .collect(),
        );
        let norm = raw.delta();
        if norm > T::zero() {
            raw.scaled(delta / norm)
        } else {
            raw
        }
    }

    pub fn and(mut self, other: Self) -> Self {
        self.shifts.extend(other.shifts);
        self
    }

    pub fn scaled(&self, factor: T) -> Self {
        let shifts = self
            .shifts
            .iter()
            .map(|s| Shift { index: s.index, drho: s.drho * factor, dalpha: s.dalpha * factor })
            .collect();
        Perturbation { shifts }
    }

    pub fn apply(&self, data: &SpectralData<T>) -> Result<SpectralData<T>> {
        self.shifts.iter().try_fold(data.clone(), |d, s| d.with_shift(s.index, s.drho, s.dalpha))
    }

    /// `ℓ₂` norm of `δ_n = |Δρ_n| + |Δα_n|` (shifts of one entry add up).
    pub fn delta(&self) -> T {
        let mut per: Vec<(usize, C<T>, C<T>)> = Vec::new();
        for s in &self.shifts {
            match per.iter_mut().find(|p| p.0 == s.index) {
                Some(p) => {
                    p.1 = p.1 + s.drho;
                    p.2 = p.2 + s.dalpha;
                }
                None => per.push((s.index, s.drho, s.dalpha)),
            }
        }
        per.iter().map(|(_, r, a)| (r.norm() + a.norm()).powi(2)).sum::<T>().sqrt()
    }
}

/// Outcome of perturb → reconstruct → forward-solve. Errors are measured
/// against the model problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripReport<T: Real> {
    pub delta_in: T,
    pub sigma_error_l2: T,
    pub r1_error_sup: T,
    pub r2_error_sup: T,
    /// `max_n |λ̂_n - λ_n| + |α̂_n - α_n|` between the reconstructed problem's
    /// data and the prescribed data, over the first `k` entries.
    pub spectral_closure_error: T,
    pub condition_max: T,
    pub k: usize,
}

/// Perturbs the model's first `k` data pairs, reconstructs, and checks that
/// the reconstruction owns the prescribed data. `options.model_data`, if
/// set, saves the forward solve of the model.
pub fn roundtrip<T: Real>(
    model: &BoundaryProblem<T>,
    perturbation: &Perturbation<T>,
    k: usize,
    options: &InverseOptions<T>,
) -> Result<RoundTripReport<T>> {
    roundtrip_with_result(model, perturbation, k, options).map(|(r, _)| r)
}

/// [`roundtrip`], also returning the reconstruction.
pub fn roundtrip_with_result<T: Real>(
    model: &BoundaryProblem<T>,
    perturbation: &Perturbation<T>,
    k: usize,
    options: &InverseOptions<T>,
) -> Result<(RoundTripReport<T>, ReconstructionResult<T>)> {
    let skip = options.skip_n.unwrap_or(0);
    let allow_multiple = skip > 0;
    let model_data = match &options.model_data {
        Some(d) => d.truncated(k)?,
        None => weight_numbers(model, &find_eigenvalues_with(model, k, &EigenOptions { allow_multiple })?)?,
    };
    let model_data = if skip > 0 { model_data.with_prefix(skip)? } else { model_data };
    let target = perturbation.apply(&model_data)?;
    let delta_in = distances(&target, &model_data)?.delta;
    let opts = InverseOptions { skip_n: options.skip_n, model_data: Some(model_data) };
    let result = inverse_solve(model, &target, k, &opts)?;
    let closure = spectral_closure(&result.problem(), &target, allow_multiple)?;
    let report = RoundTripReport {
        delta_in,
        sigma_error_l2: result.sigma.sub(model.sigma())?.l2_norm(),
        r1_error_sup: poly_sup_distance(result.polys.r1(), model.polys().r1()),
        r2_error_sup: poly_sup_distance(result.polys.r2(), model.polys().r2()),
        spectral_closure_error: closure,
        condition_max: result.diagnostics.condition_max,
        k,
    };
    Ok((report, result))
}

/// `max_{|λ| = 20} |p(λ) - q(λ)|`, sampled at 256 points.
pub(crate) fn poly_sup_distance<T: Real>(p: &[C<T>], q: &[C<T>]) -> T {
    let n = p.len().max(q.len());
    let diff: Vec<C<T>> = (0..n)
        .map(|i| p.get(i).copied().unwrap_or(cr(T::zero())) - q.get(i).copied().unwrap_or(cr(T::zero())))
        .collect();
    let r = T::of(SUP_RADIUS);
    (0..SUP_NODES)
        .map(|k| {
            let t = T::TAU() * T::of_usize(k) / T::of_usize(SUP_NODES);
            poly_eval(&diff, cx(r * t.cos(), r * t.sin())).norm()
        })
        .fold(T::zero(), T::max)
}

/// Largest `|λ̂ - λ| + |α̂ - α|` between `target` and the spectral data of
/// `problem`. Entries are paired by nearest eigenvalue, so a perturbation
/// that reorders eigenvalues with equal `Re ρ` does not register as an error.
pub fn spectral_closure<T: Real>(
    problem: &BoundaryProblem<T>,
    target: &SpectralData<T>,
    allow_multiple: bool,
) -> Result<T> {
    let n = target.count();
    let found = weight_numbers(problem, &find_eigenvalues_with(problem, n + 2, &EigenOptions { allow_multiple })?)?;
    let mut used = vec![false; found.count()];
    let mut worst = T::zero();
    for i in 0..n {
        let want = target.lambda()[i];
        let j = (0..found.count())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (found.lambda()[a] - want).norm();
                let db = (found.lambda()[b] - want).norm();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| Error::InvalidInput("no eigenvalue left to pair".into()))?;
        used[j] = true;
        let err = (found.lambda()[j] - want).norm() + (found.alpha()[j] - target.alpha()[i]).norm();
        worst = worst.max(err);
    }
    Ok(worst)
}
