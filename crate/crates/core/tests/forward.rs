use std::f64::consts::PI;
use std::sync::Arc;

use sturm_core::forward::{
    characteristic, characteristic_backward, find_eigenvalues, phi_table, psi_table, solve_ivp, weight_numbers,
    weyl_function, Anchor,
};
use sturm_core::{make_polynomial_pair, BoundaryProblem, Complex64, Error, Grid, SampledFunction};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid(m: usize) -> Arc<Grid<f64>> {
    Grid::new(m).unwrap()
}

fn sigma(m: usize, f: impl Fn(f64) -> f64) -> SampledFunction<f64> {
    SampledFunction::from_fn(grid(m), |x| c(f(x), 0.0)).unwrap()
}

fn problem(m: usize, f: impl Fn(f64) -> f64, r1: &[f64], r2: &[f64]) -> BoundaryProblem<f64> {
    let r1: Vec<_> = r1.iter().map(|&v| c(v, 0.0)).collect();
    let r2: Vec<_> = r2.iter().map(|&v| c(v, 0.0)).collect();
    BoundaryProblem::new(sigma(m, f), make_polynomial_pair(&r1, &r2).unwrap())
}

fn neumann(m: usize) -> BoundaryProblem<f64> {
    problem(m, |_| 0.0, &[1.0], &[0.0])
}

#[test]
fn cosine_solution() {
    let t = solve_ivp(&sigma(2048, |_| 0.0), c(1.0, 0.0), Anchor::Left, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        assert!((t.y.value(j) - c(x.cos(), 0.0)).norm() < 1e-8);
        assert!((t.y_quasi.value(j) - c(-x.sin(), 0.0)).norm() < 1e-8);
    }
}

#[test]
fn constant_sigma_closed_form() {
    // y = cos ρx + (c/ρ) sin ρx solves -y'' = λy with y(0) = 1, y'(0) = c
    let (cst, rho) = (0.3, 1.7);
    let t = solve_ivp(&sigma(2048, |_| cst), c(rho * rho, 0.0), Anchor::Left, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        let exact = (rho * x).cos() + cst / rho * (rho * x).sin();
        assert!((t.y.value(j).re - exact).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn backward_cosine() {
    let t = solve_ivp(&sigma(2048, |_| 0.0), c(1.0, 0.0), Anchor::Right, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((t.y.value(0) - c(-1.0, 0.0)).norm() < 1e-10);
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        assert!((t.y.value(j).re - (PI - x).cos()).abs() < 1e-10);
    }
}

#[test]
fn phi_examples() {
    let p = neumann(2048);
    let t = phi_table(&p, c(0.0, 0.0)).unwrap();
    assert!(t.y.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-14));
    assert!(t.y_quasi.values().iter().all(|v| v.norm() < 1e-14));
    let t = phi_table(&p, c(4.0, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        assert!((t.y.value(j).re - (2.0 * x).cos()).abs() < 1e-10);
    }
    let p = problem(2048, |_| 0.3, &[1.0], &[0.0]);
    let t = phi_table(&p, c(1.0, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        assert!((t.y.value(j).re - (x.cos() + 0.3 * x.sin())).abs() < 1e-10);
    }
}

#[test]
fn psi_examples() {
    let rho = 1.3;
    let t = psi_table(&neumann(2048), c(rho * rho, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        assert!((t.y.value(j).re - (rho * (PI - x)).cos()).abs() < 1e-10);
    }
    // r₂ = H: ψ^[1](π) = -H, so ψ = cos ρ(π-x) + (H/ρ) sin ρ(π-x)
    let h = 0.4;
    let t = psi_table(&problem(2048, |_| 0.0, &[1.0], &[h]), c(rho * rho, 0.0)).unwrap();
    for (j, &x) in t.y.grid().points().iter().enumerate() {
        let exact = (rho * (PI - x)).cos() + h / rho * (rho * (PI - x)).sin();
        assert!((t.y.value(j).re - exact).abs() < 1e-10);
    }
}

#[test]
fn characteristic_examples() {
    let p = neumann(2048);
    for k in 1..6 {
        assert!(characteristic(&p, c((k * k) as f64, 0.0)).unwrap().norm() < 1e-10);
    }
    let d = characteristic(&p, c(0.25, 0.0)).unwrap();
    assert!((d - c(-0.5, 0.0)).norm() < 1e-12);
    let d2 = characteristic_backward(&p, c(0.25, 0.0)).unwrap();
    assert!((d2 - d).norm() < 1e-12);
}

#[test]
fn neumann_spectrum_and_weights() {
    let p = neumann(2048);
    let data = weight_numbers(&p, &find_eigenvalues(&p, 10).unwrap()).unwrap();
    for (i, (l, a)) in data.lambda().iter().zip(data.alpha()).enumerate() {
        let n = i as f64;
        assert!((l - c(n * n, 0.0)).norm() < 1e-8, "lambda_{} = {l}", i + 1);
        let expect = if i == 0 { 1.0 / PI } else { 2.0 / PI };
        assert!((a - c(expect, 0.0)).norm() < 1e-7, "alpha_{} = {a}", i + 1);
    }
}

#[test]
fn weyl_examples() {
    let p = neumann(2048);
    assert!(weyl_function(&p, c(0.25, 0.0)).unwrap().norm() < 1e-12);
    let m = weyl_function(&p, c(-1.0, 0.0)).unwrap();
    // cot(iπ)/i = -coth π; every partial fraction α_n/(λ - λ_n) is negative here
    let coth = 1.0 / PI.tanh();
    assert!((m - c(-coth, 0.0)).norm() < 1e-10);
    assert!(matches!(weyl_function(&p, c(1.0 + 1e-9, 0.0)), Err(Error::NearPole(_))));
}

#[test]
fn single_precision_neumann() {
    let g = Grid::<f32>::new(512).unwrap();
    let one = num_complex::Complex32::new(1.0, 0.0);
    let zero = num_complex::Complex32::new(0.0, 0.0);
    let p = BoundaryProblem::new(SampledFunction::zeros(g), make_polynomial_pair(&[one], &[zero]).unwrap());
    let d = weight_numbers(&p, &find_eigenvalues(&p, 5).unwrap()).unwrap();
    for n in 0..5 {
        assert!((d.lambda()[n].re - (n * n) as f32).abs() < 1e-3 * (1.0 + (n * n) as f32));
        let alpha = if n == 0 { 1.0 } else { 2.0 } / std::f32::consts::PI;
        assert!((d.alpha()[n].re - alpha).abs() < 1e-3);
    }
}
