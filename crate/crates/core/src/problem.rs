//! The boundary problem `L(σ, r₁, r₂)` and its spectral data.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forward::ode::Propagator;
use crate::grid::{Grid, SampledFunction};
use crate::poly::PolynomialPair;
use crate::real::{cr, is_finite, Real, C};

/// A potential `σ` sampled on a grid together with a pair `(r₁, r₂)`.
#[derive(Debug, Clone)]
pub struct BoundaryProblem<T: Real> {
    sigma: SampledFunction<T>,
    polys: PolynomialPair<T>,
    propagator: Arc<Propagator<T>>,
}

impl<T: Real> BoundaryProblem<T> {
    pub fn new(sigma: SampledFunction<T>, polys: PolynomialPair<T>) -> Self {
        let propagator = Arc::new(Propagator::new(&sigma));
        BoundaryProblem { sigma, polys, propagator }
    }

    pub fn sigma(&self) -> &SampledFunction<T> {
        &self.sigma
    }

    pub fn polys(&self) -> &PolynomialPair<T> {
        &self.polys
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.sigma.grid()
    }

    pub fn degree(&self) -> usize {
        self.polys.degree()
    }

    pub(crate) fn propagator(&self) -> &Propagator<T> {
        &self.propagator
    }
}

/// Spectral data `{ρ_n, λ_n, α_n}` indexed from zero (entry `i` is the
/// eigenvalue numbered `n = i + 1`).
///
/// For a multiple eigenvalue of multiplicity `p` the group occupies `p`
/// consecutive entries sharing `λ`, each recording `p` as its multiplicity,
/// and the weights are the generalized coefficients of the Weyl function
/// at that pole. The first `prefix` entries are the unperturbed block.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T: Real> {
    rho: Vec<C<T>>,
    lambda: Vec<C<T>>,
    alpha: Vec<C<T>>,
    multiplicity: Vec<usize>,
    prefix: usize,
    m1: usize,
}

impl<T: Real> SpectralData<T> {
    /// Data with simple eigenvalues and no unperturbed prefix.
    pub fn new(rho: Vec<C<T>>, alpha: Vec<C<T>>, m1: usize) -> Result<Self> {
        let n = rho.len();
        Self::from_parts(rho, alpha, vec![1; n], 0, m1)
    }

    pub fn from_parts(
        rho: Vec<C<T>>,
        alpha: Vec<C<T>>,
        multiplicity: Vec<usize>,
        prefix: usize,
        m1: usize,
    ) -> Result<Self> {
        let lambda = rho.iter().map(|r| r * r).collect();
        let data = SpectralData { rho, lambda, alpha, multiplicity, prefix, m1 };
        data.validate()?;
        if data.alpha.len() != data.rho.len() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} eigenvalues",
                data.alpha.len(),
                data.rho.len()
            )));
        }
        Ok(data)
    }

    /// Eigenvalues without weights, as produced by the eigenvalue search.
    pub(crate) fn eigenvalues_only(rho: Vec<C<T>>, multiplicity: Vec<usize>, m1: usize) -> Self {
        let lambda = rho.iter().map(|r| r * r).collect();
        SpectralData { rho, lambda, alpha: Vec::new(), multiplicity, prefix: 0, m1 }
    }

    pub(crate) fn with_weights(mut self, alpha: Vec<C<T>>) -> Self {
        debug_assert_eq!(alpha.len(), self.rho.len());
        self.alpha = alpha;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.rho.len();
        if n == 0 {
            return Err(Error::InvalidInput("spectral data is empty".into()));
        }
        if self.multiplicity.len() != n {
            return Err(Error::InvalidInput("multiplicity list length differs from eigenvalue count".into()));
        }
        if let Some(bad) = self.rho.iter().chain(&self.alpha).position(|z| !is_finite(*z)) {
            return Err(Error::NonFinite(bad % n));
        }
        if self.prefix > n {
            return Err(Error::InvalidInput(format!("prefix {} exceeds count {n}", self.prefix)));
        }
        let mut i = 0;
        while i < n {
            let p = self.multiplicity[i];
            if p == 0 || i + p > n {
                return Err(Error::InvalidInput(format!("bad multiplicity {p} at entry {i}")));
            }
            for j in i..i + p {
                if self.multiplicity[j] != p || self.lambda[j] != self.lambda[i] {
                    return Err(Error::InvalidInput(format!("multiplicity group at entry {i} is inconsistent")));
                }
            }
            if p > 1 && i + p > self.prefix {
                return Err(Error::InvalidInput(format!(
                    "multiple eigenvalue at entry {i} lies outside the unperturbed prefix"
                )));
            }
            i += p;
        }
        // Asymptotic numbering applies beyond the first M₁ + 1 entries.
        for i in self.m1 + 2..n {
            let (a, b) = (self.rho[i - 1].re, self.rho[i].re);
            if b < a - T::of(1e-9) * T::one().max(a.abs()) {
                return Err(Error::InvalidInput(format!("Re rho decreases at entry {i}")));
            }
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[C<T>] {
        &self.rho
    }

    pub fn lambda(&self) -> &[C<T>] {
        &self.lambda
    }

    /// Weight numbers; empty until filled by `weight_numbers`.
    pub fn alpha(&self) -> &[C<T>] {
        &self.alpha
    }

    pub fn has_weights(&self) -> bool {
        self.alpha.len() == self.rho.len()
    }

    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity.iter().all(|&p| p == 1)
    }

    pub fn prefix(&self) -> usize {
        self.prefix
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    /// Marks the first `n` entries as the unperturbed prefix.
    pub fn with_prefix(mut self, n: usize) -> Result<Self> {
        self.prefix = n;
        self.validate()?;
        Ok(self)
    }

    /// Keeps the first `n` entries.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.count() {
            return Err(Error::InvalidInput(format!("cannot truncate {} entries to {n}", self.count())));
        }
        let mut multiplicity = self.multiplicity[..n].to_vec();
        // a group cut in half would no longer be a valid group
        let last = n - 1;
        if self.multiplicity[last] > 1 && (last + 1 < self.count() && self.lambda[last + 1] == self.lambda[last]) {
            return Err(Error::InvalidInput(format!("truncation at {n} splits a multiple eigenvalue")));
        }
        multiplicity.truncate(n);
        let out = SpectralData {
            rho: self.rho[..n].to_vec(),
            lambda: self.lambda[..n].to_vec(),
            alpha: self.alpha.iter().take(n).copied().collect(),
            multiplicity,
            prefix: self.prefix.min(n),
            m1: self.m1,
        };
        Ok(out)
    }

    /// Shifts `ρ` and `α` of entry `index`.
    pub fn with_shift(&self, index: usize, drho: C<T>, dalpha: C<T>) -> Result<Self> {
        if index >= self.count() || !self.has_weights() {
            return Err(Error::InvalidInput(format!("cannot shift entry {index}")));
        }
        if index < self.prefix || self.multiplicity[index] > 1 {
            return Err(Error::InvalidInput(format!("entry {index} belongs to the unperturbed block")));
        }
        let mut out = self.clone();
        out.rho[index] = out.rho[index] + drho;
        out.lambda[index] = out.rho[index] * out.rho[index];
        out.alpha[index] = out.alpha[index] + dalpha;
        out.validate()?;
        Ok(out)
    }

    /// Eigenvalue residuals `κ_n = ρ_n - (n - M₁ - 1)`.
    pub fn kappa(&self) -> Vec<C<T>> {
        self.rho.iter().enumerate().map(|(i, r)| r - cr(T::of_usize(i + 1) - T::of_usize(self.m1 + 1))).collect()
    }

    /// Weight residuals `κ⁰_n = α_n - 2/π`.
    pub fn kappa_alpha(&self) -> Vec<C<T>> {
        let two_over_pi = T::of(2.0) / T::PI();
        self.alpha.iter().map(|a| a - cr(two_over_pi)).collect()
    }

    /// Tail sums `Σ_{n ≥ i} (|κ_n|² + |κ⁰_n|²)` for each starting entry;
    /// bounded, decreasing tails are the finite-sample view of square summability.
    pub fn tail_sums(&self) -> Vec<T> {
        let k = self.kappa();
        let k0 = self.kappa_alpha();
        let mut out = vec![T::zero(); self.count()];
        let mut acc = T::zero();
        for i in (0..self.count()).rev() {
            acc = acc + k[i].norm_sqr() + k0.get(i).map_or(T::zero(), |z| z.norm_sqr());
            out[i] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lambda_is_rho_squared() {
        let d = SpectralData::new(vec![c(0.0), c(1.0), c(2.0)], vec![c(0.3); 3], 0).unwrap();
        assert_eq!(d.lambda(), &[c(0.0), c(1.0), c(4.0)]);
        let s = d.with_shift(1, c(0.5), c(0.0)).unwrap();
        assert_eq!(s.lambda()[1], c(2.25));
    }

    #[test]
    fn ordering_is_checked_past_low_block() {
        assert!(SpectralData::new(vec![c(0.0), c(2.0), c(1.0)], vec![c(0.3); 3], 0).is_err());
        // entries up to M₁ + 1 are exempt
        assert!(SpectralData::new(vec![c(3.0), c(0.0), c(1.0)], vec![c(0.3); 3], 1).is_ok());
    }

    #[test]
    fn multiple_groups_live_in_the_prefix() {
        let rho = vec![c(0.0), c(0.0), c(1.0)];
        assert!(SpectralData::from_parts(rho.clone(), vec![c(1.0); 3], vec![2, 2, 1], 0, 1).is_err());
        let d = SpectralData::from_parts(rho, vec![c(1.0); 3], vec![2, 2, 1], 2, 1).unwrap();
        assert!(!d.is_simple());
        assert!(d.truncated(1).is_err());
        assert!(d.with_shift(0, c(0.1), c(0.0)).is_err());
    }
}
