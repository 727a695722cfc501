//! Dense complex linear algebra: LU with partial pivoting, a 1-norm condition
//! estimate, and Householder least squares.

use crate::real::{cr, Real, C};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![cr(T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(T::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == cr(T::zero()) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.rows).map(|i| (0..self.cols).fold(cr(T::zero()), |acc, j| acc + self[(i, j)] * v[j])).collect()
    }

    /// Induced `∞`-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<T>()).fold(T::zero(), T::max)
    }

    pub fn norm_one(&self) -> T {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>()).fold(T::zero(), T::max)
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
    anorm_one: T,
}

impl<T: Real> Lu<T> {
    pub fn new(a: Matrix<T>) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let anorm_one = a.norm_one();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == cr(T::zero()) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Lu { lu, perm, swaps, singular, anorm_one }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> C<T> {
        let n = self.lu.rows;
        let mut d = (0..n).fold(cr(T::one()), |acc, i| acc * self.lu[(i, i)]);
        if self.swaps % 2 == 1 {
            d = -d;
        }
        d
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.rows;
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.rows;
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ z = b, Lᴴ w = z, x = Pᵀ w
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s = s - self.lu[(j, i)].conj() * z[j];
            }
            z[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s = s - self.lu[(j, i)].conj() * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![cr(T::zero()); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Hager–Higham estimate of `‖A‖₁ ‖A⁻¹‖₁`. Returns infinity for an exactly
    /// singular factorization.
    pub fn condition_estimate(&self) -> T {
        if self.singular {
            return T::infinity();
        }
        let n = self.lu.rows;
        if n == 0 {
            return T::one();
        }
        let mut x = vec![cr(T::one() / T::of_usize(n)); n];
        let mut est = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x);
            let ynorm: T = y.iter().map(|v| v.norm()).sum();
            if ynorm <= est {
                break;
            }
            est = ynorm;
            let xi: Vec<C<T>> = y
                .iter()
                .map(|v| {
                    let a = v.norm();
                    if a == T::zero() {
                        cr(T::one())
                    } else {
                        v / a
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (jmax, zmax) =
                z.iter()
                    .enumerate()
                    .map(|(j, v)| (j, v.norm()))
                    .fold((0, T::zero()), |b, c| if c.1 > b.1 { c } else { b });
            let ztx = z.iter().zip(&x).fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b);
            if zmax <= ztx.re {
                break;
            }
            x = vec![cr(T::zero()); n];
            x[jmax] = cr(T::one());
        }
        est * self.anorm_one
    }
}

/// Least-squares solution of `A x ≈ b` for a tall matrix via Householder QR.
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &[C<T>]) -> Vec<C<T>> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n && b.len() == m);
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == T::zero() { cr(T::one()) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::of(2.0);
        for j in k..n {
            let s = v.iter().enumerate().fold(cr(T::zero()), |acc, (i, vi)| acc + vi.conj() * r[(k + i, j)]);
            let f = s * (two / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] = r[(k + i, j)] - f * vi;
            }
        }
        let s = v.iter().enumerate().fold(cr(T::zero()), |acc, (i, vi)| acc + vi.conj() * rhs[k + i]);
        let f = s * (two / vnorm2);
        for (i, vi) in v.iter().enumerate() {
            rhs[k + i] = rhs[k + i] - f * vi;
        }
    }
    let mut x = vec![cr(T::zero()); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s = s - r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        a
    }

    #[test]
    fn solve_recovers_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(12, &mut rng);
        let x: Vec<_> = (0..12).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let b = a.mul_vec(&x);
        let lu = Lu::new(a.clone());
        let got = lu.solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-10);
        }
        // adjoint solve
        let mut ah = Matrix::zeros(12, 12);
        for i in 0..12 {
            for j in 0..12 {
                ah[(i, j)] = a[(j, i)].conj();
            }
        }
        let bh = ah.mul_vec(&x);
        for (g, e) in lu.solve_adjoint(&bh).iter().zip(&x) {
            assert!((g - e).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_has_unit_condition() {
        let lu = Lu::new(Matrix::<f64>::identity(7));
        assert!((lu.condition_estimate() - 1.0).abs() < 1e-14);
        assert_eq!(lu.determinant(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn condition_estimate_is_close_to_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(8, &mut rng);
        let lu = Lu::new(a.clone());
        // exact ‖A⁻¹‖₁ from explicit inverse
        let mut inv = Matrix::zeros(8, 8);
        for j in 0..8 {
            let mut e = vec![Complex64::new(0.0, 0.0); 8];
            e[j] = Complex64::new(1.0, 0.0);
            let col = lu.solve(&e);
            for i in 0..8 {
                inv[(i, j)] = col[i];
            }
        }
        let exact = a.norm_one() * inv.norm_one();
        let est = lu.condition_estimate();
        assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 3.0, "{est} vs {exact}");
    }

    #[test]
    fn singular_matrix_detected() {
        let mut a = Matrix::<f64>::identity(3);
        a[(1, 1)] = Complex64::new(0.0, 0.0);
        let lu = Lu::new(a);
        assert!(lu.is_singular());
        assert!(lu.condition_estimate().is_infinite());
    }

    #[test]
    fn least_squares_fits_exact_data() {
        let pts: Vec<_> = (0..6).map(|s| Complex64::new(0.0, 1.0 + s as f64)).collect();
        let mut a = Matrix::zeros(6, 3);
        for (i, p) in pts.iter().enumerate() {
            a[(i, 0)] = Complex64::new(1.0, 0.0);
            a[(i, 1)] = *p;
            a[(i, 2)] = p * p;
        }
        let b: Vec<_> = pts.iter().map(|p| 2.0 - p + 0.5 * p * p).collect();
        let x = least_squares(&a, &b);
        assert!((x[0] - 2.0).norm() < 1e-12 && (x[1] + 1.0).norm() < 1e-12 && (x[2] - 0.5).norm() < 1e-12);
    }
}
