//! Quadrature of products of sampled functions over `[0, x_j]`.

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::real::{cr, Real, C};

/// Composite trapezoid value of `∫₀^{x_j} f g dt`, where `j = upper_index`.
pub fn integrate_product<T: Real>(f: &SampledFunction<T>, g: &SampledFunction<T>, upper_index: usize) -> Result<C<T>> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    if upper_index >= f.grid().point_count() {
        return Err(Error::InvalidInput(format!("upper index {upper_index} outside grid")));
    }
    let h = f.grid().spacing();
    let (fv, gv) = (f.values(), g.values());
    let mut acc = cr(T::zero());
    for i in 0..upper_index {
        acc = acc + fv[i] * gv[i] + fv[i + 1] * gv[i + 1];
    }
    Ok(acc * (h * T::of(0.5)))
}

/// Trapezoid rule with the Euler–Maclaurin endpoint correction
/// `-h²/12 · [(fg)'(x_j) - (fg)'(0)]`, using exact derivatives `df`, `dg`.
/// Fourth order for smooth integrands and still exact for linear ones.
pub fn integrate_product_corrected<T: Real>(
    f: &[C<T>],
    df: &[C<T>],
    g: &[C<T>],
    dg: &[C<T>],
    h: T,
    upper_index: usize,
) -> C<T> {
    let mut acc = cr(T::zero());
    for i in 0..upper_index {
        acc = acc + f[i] * g[i] + f[i + 1] * g[i + 1];
    }
    let slope = |i: usize| df[i] * g[i] + f[i] * dg[i];
    acc * (h * T::of(0.5)) - (slope(upper_index) - slope(0)) * (h * h / T::of(12.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn cosk(m: usize, k: f64) -> SampledFunction<f64> {
        SampledFunction::from_fn(Grid::new(m).unwrap(), |x: f64| Complex64::new((k * x).cos(), 0.0)).unwrap()
    }

    #[test]
    fn constant_over_interval() {
        let one = SampledFunction::from_fn(Grid::<f64>::new(64).unwrap(), |_| Complex64::new(1.0, 0.0)).unwrap();
        let v = integrate_product(&one, &one, 64).unwrap();
        assert!((v.re - PI).abs() < 1e-14);
        assert_eq!(integrate_product(&one, &one, 0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cos_squared() {
        let f = cosk(2048, 1.0);
        let v = integrate_product(&f, &f, 2048).unwrap();
        assert!((v.re - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn grid_mismatch() {
        let a = cosk(64, 1.0);
        let b = cosk(128, 1.0);
        assert_eq!(integrate_product(&a, &b, 3).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn second_order_convergence() {
        // over [0, x] with x = 2π/3 the endpoint terms do not cancel
        for k in 1..=8 {
            for j in 1..=8 {
                // x = 115π/384 keeps (fg)'(x) away from zero for every pair here
                let err = |m: usize| {
                    let upper = 115 * m / 384;
                    let x = upper as f64 * PI / m as f64;
                    let exact = if k == j {
                        x / 2.0 + (2.0 * k as f64 * x).sin() / (4.0 * k as f64)
                    } else {
                        let (a, b) = (k as f64, j as f64);
                        ((a - b) * x).sin() / (2.0 * (a - b)) + ((a + b) * x).sin() / (2.0 * (a + b))
                    };
                    (integrate_product(&cosk(m, k as f64), &cosk(m, j as f64), upper).unwrap().re - exact).abs()
                };
                let ratio = err(384) / err(768);
                assert!(ratio >= 3.5, "k={k} j={j} ratio={ratio}");
            }
        }
    }

    #[test]
    fn corrected_rule_is_fourth_order() {
        let run = |m: usize| {
            let g = Grid::<f64>::new(m).unwrap();
            let f: Vec<_> = g.points().iter().map(|&x| Complex64::new((3.0 * x).cos(), 0.0)).collect();
            let df: Vec<_> = g.points().iter().map(|&x| Complex64::new(-3.0 * (3.0 * x).sin(), 0.0)).collect();
            let upper = 5 * m / 12;
            let x = g.x(upper);
            let exact = x / 2.0 + (6.0 * x).sin() / 12.0;
            (integrate_product_corrected(&f, &df, &f, &df, g.spacing(), upper).re - exact).abs()
        };
        assert!(run(96) / run(192) > 14.0);
    }
}
