use rayon::prelude::*;

use super::distances::distances;
use super::reconstruct::{reconstruct_r1, reconstruct_r2, reconstruct_sigma, sample_points};
use super::system::{assemble, solve_main_equation};
use super::tables::ModelTables;
use crate::error::{Error, Result};
use crate::forward::{find_eigenvalues_with, weight_numbers, EigenOptions};
use crate::grid::SampledFunction;
use crate::poly::{make_polynomial_pair, PolynomialPair};
use crate::problem::{BoundaryProblem, SpectralData};
use crate::real::{cr, Real, C};

/// Number of data pairs used when the caller does not choose.
pub const DEFAULT_TRUNCATION: usize = 40;

#[derive(Debug, Clone, Default)]
pub struct InverseOptions<T: Real> {
    /// Unperturbed prefix length `N`; sums start at `N + 1`. Defaults to the
    /// prefix declared by the target data.
    pub skip_n: Option<usize>,
    /// Precomputed model spectral data (with weights), to avoid re-solving
    /// the forward problem.
    pub model_data: Option<SpectralData<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T: Real> {
    pub truncation: usize,
    pub skip: usize,
    /// `ℓ₂` distance between target and model data over the first `K` entries.
    pub delta: T,
    /// Largest condition estimate over the grid, and where it occurred.
    pub condition_max: T,
    pub condition_argmax: usize,
    pub r1_residual: T,
    pub r2_residual: T,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult<T: Real> {
    pub sigma: SampledFunction<T>,
    pub polys: PolynomialPair<T>,
    /// Recovered `φ_{kj}(x)`, flattened as `2p + j` over the active indices.
    pub phi_recovered: Vec<SampledFunction<T>>,
    /// Zero-based spectral indices behind `phi_recovered`.
    pub active: Vec<usize>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> ReconstructionResult<T> {
    pub fn problem(&self) -> BoundaryProblem<T> {
        BoundaryProblem::new(self.sigma.clone(), self.polys.clone())
    }
}

struct PointSolution<T: Real> {
    phi: Vec<C<T>>,
    condition: T,
    determinant: C<T>,
}

/// Recovers `(σ^K, r₁^K, r₂^K)` from the first `k` entries of `target`, with
/// `model` as the reference problem. Entries past `k` are taken to coincide
/// with the model's.
pub fn inverse_solve<T: Real>(
    model: &BoundaryProblem<T>,
    target: &SpectralData<T>,
    k: usize,
    options: &InverseOptions<T>,
) -> Result<ReconstructionResult<T>> {
    if k == 0 || k > target.count() {
        return Err(Error::InvalidInput(format!("truncation {k} outside 1..={}", target.count())));
    }
    if target.m1() != model.degree() {
        return Err(Error::DegreeMismatch { r1: model.degree(), r2: target.m1() });
    }
    let skip = options.skip_n.unwrap_or(target.prefix());
    if skip > k {
        return Err(Error::InvalidInput(format!("prefix {skip} exceeds truncation {k}")));
    }
    let mut target = target.truncated(k)?;
    if target.prefix() != skip {
        target = target.with_prefix(skip)?;
    }
    let model_data = match &options.model_data {
        Some(d) => {
            if !d.has_weights() {
                return Err(Error::InvalidInput("model data without weight numbers".into()));
            }
            d.truncated(k)?
        }
        None => {
            let eig = find_eigenvalues_with(model, k, &EigenOptions { allow_multiple: skip > 0 })?;
            weight_numbers(model, &eig)?
        }
    };
    for i in skip..k {
        if model_data.multiplicity()[i] != 1 {
            return Err(Error::MultipleEigenvalue { index: i + 1, lambda: format!("{}", model_data.lambda()[i]) });
        }
    }
    let dist = distances(&target, &model_data)?;
    let tables = ModelTables::new(model, &target, &model_data, &dist, skip, k)?;

    let grid = model.grid().clone();
    let points = grid.point_count();
    let cols = 2 * tables.len();
    let solutions = if cols == 0 { Vec::new() } else { sweep(&tables)? };

    let mut condition_max = T::one();
    let mut condition_argmax = 0;
    for (x, s) in solutions.iter().enumerate() {
        if s.condition > condition_max {
            condition_max = s.condition;
            condition_argmax = x;
        }
    }
    // the determinant starts at 1 for x = 0; a sign flip of its real ratio
    // between neighbours means the path passed near a singular system
    for x in 1..solutions.len() {
        let ratio = solutions[x].determinant / solutions[x - 1].determinant;
        if !(ratio.re > T::zero()) {
            return Err(Error::DeltaTooLarge {
                x_index: x,
                condition: solutions[x].condition.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let recovered: Vec<Vec<C<T>>> = (0..cols).map(|a| solutions.iter().map(|s| s.phi[a]).collect()).collect();
    let sigma = reconstruct_sigma(model.sigma(), &tables, &recovered)?;
    let phi_pi: Vec<C<T>> = recovered.iter().map(|r| r[points - 1]).collect();
    let samples = sample_points(&tables, model.degree());
    let r1 = reconstruct_r1(model.polys(), &tables, &phi_pi, &samples)?;
    let r2 = reconstruct_r2(model.polys(), &tables, &sigma, &phi_pi, &samples)?;
    let polys = make_polynomial_pair(&r1.coeffs, &r2.coeffs)?;
    let phi_recovered = recovered.into_iter().map(|v| SampledFunction::new(grid.clone(), v)).collect::<Result<_>>()?;
    Ok(ReconstructionResult {
        sigma,
        polys,
        phi_recovered,
        active: tables.active().to_vec(),
        diagnostics: Diagnostics {
            truncation: k,
            skip,
            delta: dist.delta,
            condition_max,
            condition_argmax,
            r1_residual: r1.residual,
            r2_residual: r2.residual,
        },
    })
}

/// Solves the main equation at every grid point. The kernel values are
/// running trapezoid sums: a first parallel pass sums each chunk of
/// intervals, a prefix scan gives each chunk its starting offsets, and a
/// second pass continues the sums point by point.
fn sweep<T: Real>(tables: &ModelTables<T>) -> Result<Vec<PointSolution<T>>> {
    let n = 2 * tables.len();
    let grid = tables.grid();
    let m = grid.intervals();
    let h = grid.spacing();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let mut slot = vec![0usize; n * n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        slot[a * n + b] = i;
        slot[b * n + a] = i;
    }
    let f: Vec<&[C<T>]> = (0..n).map(|a| tables.phi(a / 2, a % 2)).collect();
    let df: Vec<&[C<T>]> = (0..n).map(|a| tables.phi_prime(a / 2, a % 2)).collect();

    let chunk_count = (rayon::current_num_threads() * 4).clamp(1, m);
    let bounds: Vec<(usize, usize)> =
        (0..chunk_count).map(|c| (c * m / chunk_count, (c + 1) * m / chunk_count)).collect();

    let partial: Vec<Vec<C<T>>> = bounds
        .par_iter()
        .map(|&(s, e)| {
            pairs
                .iter()
                .map(|&(a, b)| {
                    let mut acc = cr(T::zero());
                    for i in s..e {
                        acc = acc + f[a][i] * f[b][i] + f[a][i + 1] * f[b][i + 1];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut offsets = Vec::with_capacity(chunk_count);
    let mut run = vec![cr(T::zero()); pairs.len()];
    for p in &partial {
        offsets.push(run.clone());
        for (r, v) in run.iter_mut().zip(p) {
            *r = *r + *v;
        }
    }

    let half_h = h * T::of(0.5);
    let em = h * h / T::of(12.0);
    let slope = |a: usize, b: usize, i: usize| df[a][i] * f[b][i] + f[a][i] * df[b][i];
    let slope0: Vec<C<T>> = pairs.iter().map(|&(a, b)| slope(a, b, 0)).collect();

    let chunks: Vec<Vec<PointSolution<T>>> = bounds
        .par_iter()
        .zip(offsets.into_par_iter())
        .enumerate()
        .map(|(c, (&(s, e), mut acc))| {
            let last = if c + 1 == chunk_count { e } else { e - 1 };
            let mut out = Vec::with_capacity(last + 1 - s);
            let mut d = vec![cr(T::zero()); pairs.len()];
            for x in s..=last {
                for (i, &(a, b)) in pairs.iter().enumerate() {
                    d[i] = acc[i] * half_h - (slope(a, b, x) - slope0[i]) * em;
                }
                let system = assemble(tables, x, |a, b| d[slot[a * n + b]]);
                let sol = solve_main_equation(&system).map_err(|err| match err {
                    Error::SingularSystem { x_index, condition } => Error::DeltaTooLarge { x_index, condition },
                    other => other,
                })?;
                out.push(PointSolution { phi: sol.phi, condition: sol.condition, determinant: sol.determinant });
                if x < m {
                    for (i, &(a, b)) in pairs.iter().enumerate() {
                        acc[i] = acc[i] + f[a][x] * f[b][x] + f[a][x + 1] * f[b][x + 1];
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
