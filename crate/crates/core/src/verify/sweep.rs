use rayon::prelude::*;

use super::roundtrip::{roundtrip, Perturbation, RoundTripReport};
use crate::error::{Error, Result};
use crate::forward::{find_eigenvalues_with, weight_numbers, EigenOptions};
use crate::inverse::InverseOptions;
use crate::problem::BoundaryProblem;
use crate::real::Real;

/// Accepted range for a fitted log-log slope.
pub const SLOPE_WINDOW: (f64, f64) = (0.8, 1.2);

/// Errors per delta for the three channels `σ`, `r₁`, `r₂` (in that order),
/// with least-squares fits `log e = slope · log δ + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T: Real> {
    pub deltas: Vec<T>,
    pub reports: Vec<RoundTripReport<T>>,
    pub errors: [Vec<T>; 3],
    pub slopes: [T; 3],
    pub intercepts: [T; 3],
}

impl<T: Real> SweepReport<T> {
    /// Stability constants `C = exp(intercept)`.
    pub fn constants(&self) -> [T; 3] {
        self.intercepts.map(|b| b.exp())
    }

    pub fn slopes_within(&self, lo: T, hi: T) -> [bool; 3] {
        self.slopes.map(|s| s >= lo && s <= hi)
    }
}

/// Least-squares line through `(log x, log y)`: `(slope, intercept)`.
pub fn loglog_fit<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::of_usize(x.len());
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxy = lx.iter().zip(&ly).map(|(a, b)| (*a - mx) * (*b - my)).sum::<T>();
    let sxx = lx.iter().map(|a| (*a - mx) * (*a - mx)).sum::<T>();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Round trips along `direction`, rescaled so that the data distance equals
/// each entry of `deltas` (strictly decreasing, positive).
pub fn stability_sweep<T: Real>(
    model: &BoundaryProblem<T>,
    direction: &Perturbation<T>,
    deltas: &[T],
    k: usize,
    options: &InverseOptions<T>,
) -> Result<SweepReport<T>> {
    if deltas.len() < 2 {
        return Err(Error::InvalidInput("a sweep needs at least two deltas".into()));
    }
    if deltas.iter().any(|d| !(d.is_finite() && *d > T::zero())) {
        return Err(Error::InvalidInput("sweep deltas must be positive and finite".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("sweep deltas must be strictly decreasing".into()));
    }
    let unit = direction.delta();
    if !(unit > T::zero()) {
        return Err(Error::InvalidInput("sweep direction is zero".into()));
    }
    let mut options = options.clone();
    if options.model_data.is_none() {
        let allow_multiple = options.skip_n.unwrap_or(0) > 0;
        let eig = find_eigenvalues_with(model, k, &EigenOptions { allow_multiple })?;
        options.model_data = Some(weight_numbers(model, &eig)?);
    }
    let reports: Vec<RoundTripReport<T>> = deltas
        .par_iter()
        .map(|&d| {
            roundtrip(model, &direction.scaled(d / unit), k, &options)
                .map_err(|e| Error::SweepFailure { delta: d.to_f64().unwrap_or(f64::NAN), source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let errors = [
        reports.iter().map(|r| r.sigma_error_l2).collect::<Vec<_>>(),
        reports.iter().map(|r| r.r1_error_sup).collect(),
        reports.iter().map(|r| r.r2_error_sup).collect(),
    ];
    let fits = [0, 1, 2].map(|c| loglog_fit(deltas, &errors[c]));
    Ok(SweepReport {
        deltas: deltas.to_vec(),
        reports,
        slopes: fits.map(|f| f.0),
        intercepts: fits.map(|f| f.1),
        errors,
    })
}
