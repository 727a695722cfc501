//! Complex polynomial algebra and the boundary-condition polynomial pair.

use crate::error::{Error, Result};
use crate::real::{cr, Real, C};

/// Root-distance tolerance for the coprimality test.
pub const GCD_TOLERANCE: f64 = 1e-8;
const MONIC_TOLERANCE: f64 = 1e-12;

/// Horner evaluation of `Σ p[k] λᵏ`. The empty polynomial is zero.
pub fn poly_eval<T: Real>(p: &[C<T>], lambda: C<T>) -> C<T> {
    p.iter().rev().fold(cr(T::zero()), |acc, &c| acc * lambda + c)
}

/// Formal derivative. Constants map to `[0]`.
pub fn poly_derivative<T: Real>(p: &[C<T>]) -> Vec<C<T>> {
    if p.len() <= 1 {
        return vec![cr(T::zero())];
    }
    p.iter().enumerate().skip(1).map(|(k, &c)| c * T::of_usize(k)).collect()
}

/// Roots of `p` from the eigenvalues of its companion matrix.
///
/// High-order coefficients that vanish are dropped first; a polynomial that is
/// identically zero yields `None`.
pub fn poly_roots<T: Real>(p: &[C<T>]) -> Option<Vec<C<T>>> {
    let scale = p.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    if scale == T::zero() {
        return None;
    }
    let cut = scale * T::of(1e-14);
    let mut deg = p.len() - 1;
    while deg > 0 && p[deg].norm() <= cut {
        deg -= 1;
    }
    if deg == 0 {
        return Some(Vec::new());
    }
    let lead = p[deg];
    let mut h = vec![vec![cr(T::zero()); deg]; deg];
    for j in 0..deg {
        h[0][j] = -p[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        h[i][i - 1] = cr(T::one());
    }
    Some(hessenberg_eigenvalues(h))
}

/// Shifted QR iteration on an upper Hessenberg matrix.
fn hessenberg_eigenvalues<T: Real>(mut h: Vec<Vec<C<T>>>) -> Vec<C<T>> {
    let n = h.len();
    let eps = T::epsilon();
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            eig.push(h[0][0]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[l][l].norm() + h[l - 1][l - 1].norm();
            let floor = if s == T::zero() { eps } else { eps * s };
            if h[l][l - 1].norm() <= floor {
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 200 {
            // give up on this block: report its diagonal
            for k in (l..=hi).rev() {
                eig.push(h[k][k]);
            }
            if l == 0 {
                break;
            }
            hi = l - 1;
            iter = 0;
            continue;
        }
        let (a, b, c, d) = (h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
        let mu = if iter % 11 == 10 {
            d + cr(c.norm() * T::of(0.75))
        } else {
            let half = T::of(0.5);
            let tr = (a + d) * half;
            let disc = (tr * tr - (a * d - b * c)).sqrt();
            let (m1, m2) = (tr + disc, tr - disc);
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[k][k] = h[k][k] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == T::zero() { (cr(T::one()), cr(T::zero())) } else { (x / r, y / r) };
            for j in k..=hi {
                let (u, v) = (h[k][j], h[k + 1][j]);
                h[k][j] = cs.conj() * u + sn.conj() * v;
                h[k + 1][j] = -sn * u + cs * v;
            }
            rots.push((cs, sn));
        }
        for (idx, (cs, sn)) in rots.into_iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let (u, v) = (h[i][k], h[i][k + 1]);
                h[i][k] = u * cs + v * sn;
                h[i][k + 1] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in l..=hi {
            h[k][k] = h[k][k] + mu;
        }
    }
    eig
}

/// Coefficients of `(r₁, r₂)` in class R: `r₁` monic of degree `M₁`, `r₂` of
/// formal degree `M₁` (high coefficients may vanish), no common roots.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPair<T: Real> {
    r1: Vec<C<T>>,
    r2: Vec<C<T>>,
}

/// Validates and builds a [`PolynomialPair`]; coefficients are listed from
/// the constant term upwards.
pub fn make_polynomial_pair<T: Real>(r1: &[C<T>], r2: &[C<T>]) -> Result<PolynomialPair<T>> {
    let pair = make_polynomial_pair_unchecked(r1, r2)?;
    pair.check_coprime()?;
    Ok(pair)
}

/// Like [`make_polynomial_pair`] but skips the coprimality test. Used for the
/// degenerate model pairs `(λ^M, 0)` which violate it by construction.
pub fn make_polynomial_pair_unchecked<T: Real>(r1: &[C<T>], r2: &[C<T>]) -> Result<PolynomialPair<T>> {
    if r1.is_empty() || r2.is_empty() {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    let m1 = r1.len() - 1;
    let lead = r1[m1];
    if (lead - cr(T::one())).norm() > T::of(MONIC_TOLERANCE) {
        return Err(Error::NonMonic(format!("{lead}")));
    }
    let zero = cr(T::zero());
    let mut r2v = r2.to_vec();
    while r2v.len() > m1 + 1 && r2v.last() == Some(&zero) {
        r2v.pop();
    }
    if r2v.len() > m1 + 1 {
        return Err(Error::DegreeMismatch { r1: m1, r2: r2v.len() - 1 });
    }
    r2v.resize(m1 + 1, zero);
    Ok(PolynomialPair { r1: r1.to_vec(), r2: r2v })
}

impl<T: Real> PolynomialPair<T> {
    pub fn degree(&self) -> usize {
        self.r1.len() - 1
    }

    pub fn r1(&self) -> &[C<T>] {
        &self.r1
    }

    pub fn r2(&self) -> &[C<T>] {
        &self.r2
    }

    pub fn eval_r1(&self, lambda: C<T>) -> C<T> {
        poly_eval(&self.r1, lambda)
    }

    pub fn eval_r2(&self, lambda: C<T>) -> C<T> {
        poly_eval(&self.r2, lambda)
    }

    pub fn eval_r1_derivative(&self, lambda: C<T>) -> C<T> {
        poly_eval(&poly_derivative(&self.r1), lambda)
    }

    pub fn eval_r2_derivative(&self, lambda: C<T>) -> C<T> {
        poly_eval(&poly_derivative(&self.r2), lambda)
    }

    fn check_coprime(&self) -> Result<()> {
        let roots1 = poly_roots(&self.r1).unwrap_or_default();
        if roots1.is_empty() {
            return Ok(());
        }
        let Some(roots2) = poly_roots(&self.r2) else {
            return Err(Error::CommonRoot(format!("{}", roots1[0]), 0.0));
        };
        let tol = T::of(GCD_TOLERANCE);
        for a in &roots1 {
            for b in &roots2 {
                let d = (*a - *b).norm();
                if d < tol {
                    return Err(Error::CommonRoot(format!("{a}"), d.to_f64().unwrap_or(0.0)));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly_eval(&[c(2.0, 0.0), c(1.0, 0.0)], c(3.0, 0.0)), c(5.0, 0.0));
        assert_eq!(poly_eval(&[c(1.0, 0.0)], c(-7.0, 3.0)), c(1.0, 0.0));
        let v = poly_eval(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 2.0));
        assert!((v - c(-4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(poly_derivative(&[c(2.0, 0.0), c(1.0, 0.0)]), vec![c(1.0, 0.0)]);
        assert_eq!(poly_derivative(&[c(1.0, 0.0)]), vec![c(0.0, 0.0)]);
        assert_eq!(poly_derivative(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]), vec![c(0.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn pair_examples() {
        let p = make_polynomial_pair(&[c(1.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 0);
        let p = make_polynomial_pair(&[c(2.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(matches!(make_polynomial_pair(&[c(0.0, 0.0), c(2.0, 0.0)], &[c(1.0, 0.0)]), Err(Error::NonMonic(_))));
    }

    #[test]
    fn pair_padding_and_degree_errors() {
        let p = make_polynomial_pair(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert_eq!(p.r2().len(), 3);
        let err = make_polynomial_pair(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { r1: 0, r2: 1 });
        assert!(make_polynomial_pair::<f64>(&[], &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn common_roots_rejected() {
        // (λ-1)(λ+2) and 3(λ-1)
        let r1 = [c(-2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let r2 = [c(-3.0, 0.0), c(3.0, 0.0)];
        assert!(matches!(make_polynomial_pair(&r1, &r2), Err(Error::CommonRoot(..))));
        // λ with r2 ≡ 0
        assert!(matches!(
            make_polynomial_pair(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0)]),
            Err(Error::CommonRoot(..))
        ));
        assert!(make_polynomial_pair_unchecked(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0)]).is_ok());
    }

    #[test]
    fn companion_roots() {
        // (λ - i)(λ + 2)(λ - 3) = λ³ + (-1 - i)λ² + (-6 + i)λ + 6i
        let p = [c(0.0, 6.0), c(-6.0, 1.0), c(-1.0, -1.0), c(1.0, 0.0)];
        let mut roots = poly_roots(&p).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let expect = [c(-2.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)];
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).norm() < 1e-10, "{r} vs {e}");
        }
    }

    fn arb_coeffs(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..=max_len)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(p in arb_coeffs(6), re in -10.0..10.0f64, im in -10.0..10.0f64) {
            let lam = c(re, im);
            if lam.norm() <= 10.0 {
                let h = 1e-5;
                let fd = (poly_eval(&p, lam + h) - poly_eval(&p, lam - h)) / (2.0 * h);
                let exact = poly_eval(&poly_derivative(&p), lam);
                let scale = exact.norm().max(1.0);
                prop_assert!((fd - exact).norm() / scale < 1e-6);
            }
        }

        #[test]
        fn pair_reads_back(mut r1 in arb_coeffs(4), seed in arb_coeffs(4)) {
            let last = r1.len() - 1;
            r1[last] = c(1.0, 0.0);
            let mut r2 = seed;
            r2.truncate(r1.len());
            if let Ok(p) = make_polynomial_pair(&r1, &r2) {
                prop_assert_eq!(p.r1(), &r1[..]);
                prop_assert_eq!(&p.r2()[..r2.len()], &r2[..]);
                let again = make_polynomial_pair(p.r1(), p.r2()).unwrap();
                prop_assert_eq!(again, p);
            }
        }
    }
}
