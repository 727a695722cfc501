use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::{find_eigenvalues, weight_numbers};
use crate::grid::{Grid, SampledFunction};
use crate::poly::make_polynomial_pair;
use crate::problem::{BoundaryProblem, SpectralData};
use crate::real::{cr, Real};

/// A random problem together with its first eigenvalues and weights.
#[derive(Debug, Clone)]
pub struct CorpusEntry<T: Real> {
    pub problem: BoundaryProblem<T>,
    pub data: SpectralData<T>,
    /// Breakpoints `(x, σ(x))` of the piecewise-linear potential.
    pub knots: Vec<(f64, f64)>,
}

const SIGMA_BOUND: f64 = 0.5;
const MAX_DEGREE: usize = 2;

/// `count` problems with piecewise-linear `σ` (`|σ| ≤ 0.5`), real polynomial
/// pairs of degree `M₁ ≤ 2` and simple spectra, drawn from a ChaCha stream
/// seeded with `seed`. Candidates with a common root or a multiple
/// eigenvalue among the first `n_max` are redrawn.
pub fn random_corpus<T: Real>(seed: u64, count: usize, intervals: usize, n_max: usize) -> Result<Vec<CorpusEntry<T>>> {
    let grid = Grid::<T>::new(intervals)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        if draws > 20 * count + 20 {
            return Err(Error::InvalidInput(format!("no admissible problems from seed {seed}")));
        }
        let pieces = rng.gen_range(2..=5);
        let mut xs: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.2..std::f64::consts::PI - 0.2)).collect();
        xs.push(0.0);
        xs.push(std::f64::consts::PI);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let knots: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, rng.gen_range(-SIGMA_BOUND..SIGMA_BOUND))).collect();
        let m1 = rng.gen_range(0..=MAX_DEGREE);
        let mut r1: Vec<_> = (0..m1).map(|_| cr(T::of(rng.gen_range(-1.0..1.0)))).collect();
        r1.push(cr(T::one()));
        let r2: Vec<_> = (0..=m1).map(|_| cr(T::of(rng.gen_range(-1.0..1.0)))).collect();
        let Ok(polys) = make_polynomial_pair(&r1, &r2) else { continue };
        let sigma =
            SampledFunction::from_fn(grid.clone(), |x| cr(T::of(piecewise_linear(&knots, x.to_f64().unwrap_or(0.0)))))?;
        let problem = BoundaryProblem::new(sigma, polys);
        let eig = match find_eigenvalues(&problem, n_max) {
            Ok(e) => e,
            Err(Error::MultipleEigenvalue { .. }) => continue,
            Err(e) => return Err(e),
        };
        let data = weight_numbers(&problem, &eig)?;
        out.push(CorpusEntry { problem, data, knots });
    }
    Ok(out)
}

/// Linear interpolation through sorted `knots`, constant beyond the ends.
pub(crate) fn piecewise_linear(knots: &[(f64, f64)], x: f64) -> f64 {
    match knots.iter().position(|&(k, _)| k >= x) {
        Some(0) => knots[0].1,
        Some(i) => {
            let (x0, y0) = knots[i - 1];
            let (x1, y1) = knots[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
        None => knots.last().map_or(0.0, |k| k.1),
    }
}
