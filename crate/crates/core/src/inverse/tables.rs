use std::sync::Arc;

use rayon::prelude::*;

use super::distances::DistanceSequences;
use crate::error::{Error, Result};
use crate::forward::phi_table;
use crate::grid::Grid;
use crate::problem::{BoundaryProblem, SpectralData};
use crate::quad::integrate_product_corrected;
use crate::real::{Real, C};

type Column<T> = Arc<Vec<C<T>>>;
type Solved<T> = ((usize, usize), [Column<T>; 3]);

/// Model solutions `φ̃_{kj}(x) = φ̃(x, λ_{kj})` for the active indices, with
/// `λ_{k0} = λ_k` (target) and `λ_{k1} = λ̃_k` (model).
///
/// Active entries are addressed by their position `p` in [`active`](Self::active);
/// the flattened column index of `(p, j)` is `2p + j`.
#[derive(Debug, Clone)]
pub struct ModelTables<T: Real> {
    grid: Arc<Grid<T>>,
    active: Vec<usize>,
    lambda: Vec<[C<T>; 2]>,
    alpha: Vec<[C<T>; 2]>,
    delta: Vec<T>,
    chi: Vec<T>,
    phi: Vec<[Column<T>; 2]>,
    phi_quasi: Vec<[Column<T>; 2]>,
    phi_prime: Vec<[Column<T>; 2]>,
}

impl<T: Real> ModelTables<T> {
    /// Tabulates the model solutions for entries `skip..k` (zero-based).
    pub fn new(
        model: &BoundaryProblem<T>,
        target: &SpectralData<T>,
        model_data: &SpectralData<T>,
        dist: &DistanceSequences<T>,
        skip: usize,
        k: usize,
    ) -> Result<Self> {
        if k > target.count() || k > model_data.count() {
            return Err(Error::InvalidInput(format!("truncation {k} exceeds the data count {}", target.count())));
        }
        if skip > k {
            return Err(Error::InvalidInput(format!("prefix {skip} exceeds truncation {k}")));
        }
        let active: Vec<usize> = (skip..k).collect();
        let lambda: Vec<[C<T>; 2]> = active.iter().map(|&i| [target.lambda()[i], model_data.lambda()[i]]).collect();
        let alpha = active.iter().map(|&i| [target.alpha()[i], model_data.alpha()[i]]).collect();
        let delta = active.iter().map(|&i| dist.delta_n[i]).collect();
        let chi = active.iter().map(|&i| dist.chi_n[i]).collect();

        let jobs: Vec<(usize, usize)> = (0..active.len())
            .flat_map(|p| [(p, 0), (p, 1)])
            .filter(|&(p, j)| j == 0 || lambda[p][1] != lambda[p][0])
            .collect();
        let sigma = model.sigma().values();
        let solved: Vec<Solved<T>> = jobs
            .par_iter()
            .map(|&(p, j)| {
                let t = phi_table(model, lambda[p][j])?;
                let y = t.y.values().to_vec();
                let q = t.y_quasi.values().to_vec();
                let d = y.iter().zip(&q).zip(sigma).map(|((y, q), s)| q + s * y).collect();
                Ok(((p, j), [Arc::new(y), Arc::new(q), Arc::new(d)]))
            })
            .collect::<Result<_>>()?;

        let mut slots: Vec<[Option<[Column<T>; 3]>; 2]> = vec![[None, None]; active.len()];
        for ((p, j), cols) in solved {
            slots[p][j] = Some(cols);
        }
        let mut phi = Vec::with_capacity(active.len());
        let mut phi_quasi = Vec::with_capacity(active.len());
        let mut phi_prime = Vec::with_capacity(active.len());
        for s in slots {
            let a = s[0].clone().expect("target column solved");
            let b = s[1].clone().unwrap_or_else(|| a.clone());
            phi.push([a[0].clone(), b[0].clone()]);
            phi_quasi.push([a[1].clone(), b[1].clone()]);
            phi_prime.push([a[2].clone(), b[2].clone()]);
        }
        Ok(ModelTables { grid: model.grid().clone(), active, lambda, alpha, delta, chi, phi, phi_quasi, phi_prime })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    /// Zero-based spectral indices taking part in the sums.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn lambda(&self, p: usize, j: usize) -> C<T> {
        self.lambda[p][j]
    }

    pub fn alpha(&self, p: usize, j: usize) -> C<T> {
        self.alpha[p][j]
    }

    pub fn delta(&self, p: usize) -> T {
        self.delta[p]
    }

    pub fn chi(&self, p: usize) -> T {
        self.chi[p]
    }

    pub fn phi(&self, p: usize, j: usize) -> &[C<T>] {
        &self.phi[p][j]
    }

    pub fn phi_quasi(&self, p: usize, j: usize) -> &[C<T>] {
        &self.phi_quasi[p][j]
    }

    /// `φ̃' = φ̃^[1] + σ̃ φ̃`.
    pub fn phi_prime(&self, p: usize, j: usize) -> &[C<T>] {
        &self.phi_prime[p][j]
    }
}

/// `D̃(x_j, λ_{ni}, λ_{kj}) = ∫₀^{x_j} φ̃_{ni} φ̃_{kj} dt` in integral form
/// (endpoint-corrected trapezoid). `n`, `k` are positions in the active set.
pub fn kernel_d<T: Real>(
    tables: &ModelTables<T>,
    x_index: usize,
    (n, i): (usize, usize),
    (k, j): (usize, usize),
) -> Result<C<T>> {
    if n >= tables.len() || k >= tables.len() || i > 1 || j > 1 {
        return Err(Error::InvalidInput(format!("kernel index ({n},{i}) / ({k},{j}) out of range")));
    }
    if x_index >= tables.grid.point_count() {
        return Err(Error::InvalidInput(format!("grid index {x_index} out of range")));
    }
    Ok(integrate_product_corrected(
        tables.phi(n, i),
        tables.phi_prime(n, i),
        tables.phi(k, j),
        tables.phi_prime(k, j),
        tables.grid.spacing(),
        x_index,
    ))
}
