//! Uniform grids on `[0, π]` and complex samples attached to them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{is_finite, Real, C};

/// Default number of grid intervals.
pub const DEFAULT_INTERVALS: usize = 2048;

/// Uniform grid `0 = x_0 < … < x_m = π` with spacing `h = π / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T: Real> {
    points: Vec<T>,
    h: T,
}

impl<T: Real> Grid<T> {
    /// Builds a grid with `intervals` equal subintervals.
    pub fn new(intervals: usize) -> Result<Arc<Self>> {
        let count = intervals + 1;
        if count < 16 {
            return Err(Error::GridTooSmall(count));
        }
        let pi = T::PI();
        let h = pi / T::of_usize(intervals);
        let mut points: Vec<T> = (0..count).map(|j| T::of_usize(j) * h).collect();
        points[0] = T::zero();
        points[intervals] = pi;
        Ok(Arc::new(Grid { points, h }))
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn spacing(&self) -> T {
        self.h
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn x(&self, j: usize) -> T {
        self.points[j]
    }
}

/// Complex values sampled on every point of a [`Grid`].
#[derive(Debug, Clone)]
pub struct SampledFunction<T: Real> {
    grid: Arc<Grid<T>>,
    values: Vec<C<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::InvalidInput(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.point_count()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !is_finite(*v)) {
            return Err(Error::NonFinite(bad));
        }
        Ok(SampledFunction { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(T) -> C<T>) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let n = grid.point_count();
        SampledFunction { grid, values: vec![C::new(T::zero(), T::zero()); n] }
    }

    pub(crate) fn from_raw(grid: Arc<Grid<T>>, values: Vec<C<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.point_count());
        SampledFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn value(&self, j: usize) -> C<T> {
        self.values[j]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Pointwise difference on a shared grid.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(SampledFunction { grid: self.grid.clone(), values })
    }

    /// `L₂(0, π)` norm by the trapezoid rule.
    pub fn l2_norm(&self) -> T {
        let h = self.grid.spacing();
        let n = self.values.len();
        let two = T::of(2.0);
        let mut acc = T::zero();
        for (j, v) in self.values.iter().enumerate() {
            let w = if j == 0 || j == n - 1 { T::one() / two } else { T::one() };
            acc = acc + w * v.norm_sqr();
        }
        (acc * h).sqrt()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}
