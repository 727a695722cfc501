//! Eigenvalue search.
//!
//! Eigenvalues numbered past `M₁ + 1` are polished by Newton's method from the
//! asymptotic seeds `ρ ≈ n - M₁ - 1`. The low ones are located by an
//! argument-principle scan of a box around the origin, and the result is
//! cross-checked by counting zeros inside a circle that separates the last
//! requested eigenvalue from the next one.

use std::collections::HashMap;

use super::{characteristic, characteristic_with_derivative};
use crate::error::{Error, Result};
use crate::poly::poly_roots;
use crate::problem::{BoundaryProblem, SpectralData};
use crate::real::{cr, cx, principal_sqrt, tol, Real, C};

/// `|Δ'(λ_n)|` at or below this marks an eigenvalue as not simple.
pub const TAU_SIMPLE: f64 = 1e-8;

/// Clusters tighter than this (relative to `max(1, |λ|)`) count as one
/// multiple eigenvalue.
const CLUSTER_SPREAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
pub struct EigenOptions {
    /// Accept multiple eigenvalues instead of failing with `MultipleEigenvalue`.
    pub allow_multiple: bool,
}

/// The first `n_max` eigenvalues of `problem` (weights not yet filled).
pub fn find_eigenvalues<T: Real>(problem: &BoundaryProblem<T>, n_max: usize) -> Result<SpectralData<T>> {
    find_eigenvalues_with(problem, n_max, &EigenOptions::default())
}

pub fn find_eigenvalues_with<T: Real>(
    problem: &BoundaryProblem<T>,
    n_max: usize,
    options: &EigenOptions,
) -> Result<SpectralData<T>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let m1 = problem.degree();
    let mut search = Search { problem, cache: HashMap::new() };

    let mut roots = Vec::new();
    for n in m1 + 2..=n_max + 1 {
        let seed = cr(T::of_usize(n - m1 - 1));
        if let Some(z) = search.newton_rho(seed)? {
            roots.push(Root { lambda: z, mult: 1 });
        }
    }
    let base = low_box_size(problem);
    for n in search.low_box(base)? {
        insert_root(&mut roots, n);
    }
    let mut attempt = 0;
    let expected = loop {
        match search.verify(&roots, n_max)? {
            Ok(()) => break None,
            Err(miss) if attempt >= 3 => break Some(miss),
            Err(_) => {}
        }
        attempt += 1;
        // Broaden: off-integer seeds, then a larger low box.
        for n in m1 + 1..=n_max + 2 {
            for off in [-0.35, 0.35] {
                let seed = cr(T::of_usize(n) - T::of_usize(m1 + 1) + T::of(off));
                if let Some(z) = search.newton_rho(seed)? {
                    insert_root(&mut roots, Root { lambda: z, mult: 1 });
                }
            }
        }
        for n in search.low_box(base * T::of(f64::powi(2.0, attempt)))? {
            insert_root(&mut roots, n);
        }
    };
    if let Some((expected, found, radius)) = expected {
        return Err(Error::MissedRoot { expected, found, radius });
    }

    // Multiplicity checks.
    let mut checked = Vec::with_capacity(roots.len());
    for i in 0..roots.len() {
        let r = roots[i];
        if r.mult == 1 {
            let (_, d1) = characteristic_with_derivative(problem, r.lambda)?;
            if d1.norm() > T::of(TAU_SIMPLE) {
                checked.push(r);
                continue;
            }
            let gap = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| (o.lambda - r.lambda).norm())
                .fold(T::infinity(), T::min);
            let radius = (gap * T::of(0.5)).min(T::of(1e-2) * T::one().max(r.lambda.norm()));
            checked.extend(search.cluster(r.lambda, radius)?);
        } else {
            checked.push(r);
        }
    }
    let mut roots = checked;
    roots.sort_by(|a, b| {
        let (ra, rb) = (principal_sqrt(a.lambda), principal_sqrt(b.lambda));
        ra.re.partial_cmp(&rb.re).unwrap().then(ra.im.partial_cmp(&rb.im).unwrap())
    });

    let mut rho = Vec::new();
    let mut mult = Vec::new();
    for r in &roots {
        if rho.len() >= n_max {
            break;
        }
        if r.mult > 1 && !options.allow_multiple {
            return Err(Error::MultipleEigenvalue { index: rho.len() + 1, lambda: format!("{}", r.lambda) });
        }
        let s = principal_sqrt(r.lambda);
        for _ in 0..r.mult {
            rho.push(s);
            mult.push(r.mult);
        }
    }
    if rho.len() < n_max {
        return Err(Error::MissedRoot { expected: n_max as i64, found: rho.len(), radius: f64::NAN });
    }
    Ok(SpectralData::eigenvalues_only(rho, mult, m1))
}

#[derive(Debug, Clone, Copy)]
struct Root<T: Real> {
    lambda: C<T>,
    mult: usize,
}

fn same_root<T: Real>(a: C<T>, b: C<T>) -> bool {
    (a - b).norm() <= tol::<T>(1e-7, 1e4) * T::one().max(a.norm())
}

/// Adds `r` unless it is already known. A cluster result replaces a simple
/// root Newton may have found at the same place.
fn insert_root<T: Real>(roots: &mut Vec<Root<T>>, r: Root<T>) {
    match roots.iter_mut().find(|o| same_root(o.lambda, r.lambda)) {
        Some(o) if o.mult < r.mult => *o = r,
        Some(_) => {}
        None => roots.push(r),
    }
}

/// Half-width of the low search box: `(M₁ + 2)²` inflated by the size of the
/// problem's coefficients.
fn low_box_size<T: Real>(problem: &BoundaryProblem<T>) -> T {
    let p = problem.polys();
    let m1 = p.degree();
    let coeff = p.r1()[..m1]
        .iter()
        .chain(p.r2())
        .map(|z| z.norm())
        .chain(std::iter::once(problem.sigma().sup_norm()))
        .fold(T::zero(), T::max);
    let base = T::of_usize((m1 + 2) * (m1 + 2));
    base * (T::one() + coeff)
}

struct Search<'a, T: Real> {
    problem: &'a BoundaryProblem<T>,
    cache: HashMap<(u64, u64), C<T>>,
}

fn key<T: Real>(z: C<T>) -> (u64, u64) {
    (z.re.to_f64().unwrap_or(0.0).to_bits(), z.im.to_f64().unwrap_or(0.0).to_bits())
}

impl<T: Real> Search<'_, T> {
    fn delta(&mut self, z: C<T>) -> Result<C<T>> {
        let k = key(z);
        if let Some(v) = self.cache.get(&k) {
            return Ok(*v);
        }
        let v = characteristic(self.problem, z)?;
        self.cache.insert(k, v);
        Ok(v)
    }

    fn newton_lambda(&self, z0: C<T>) -> Result<Option<C<T>>> {
        let mut z = z0;
        let mut last = T::infinity();
        for _ in 0..50 {
            let (d, dd) = characteristic_with_derivative(self.problem, z)?;
            if dd.norm() == T::zero() {
                return Ok(None);
            }
            let step = d / dd;
            z = z - step;
            last = step.norm();
            if last <= tol::<T>(1e-14, 4.0) * T::one().max(z.norm()) {
                break;
            }
        }
        let ok = last <= tol::<T>(1e-9, 1e3) * T::one().max(z.norm());
        Ok(ok.then_some(z))
    }

    fn newton_rho(&self, rho0: C<T>) -> Result<Option<C<T>>> {
        let mut rho = rho0;
        let mut last = T::infinity();
        for _ in 0..60 {
            let (d, dd) = characteristic_with_derivative(self.problem, rho * rho)?;
            let deriv = dd * rho * T::of(2.0);
            if deriv.norm() == T::zero() {
                return Ok(None);
            }
            let mut step = d / deriv;
            let cap = T::of(0.3);
            if step.norm() > cap {
                step = step * (cap / step.norm());
            }
            rho = rho - step;
            last = step.norm();
            if last <= tol::<T>(1e-14, 4.0) * T::one().max(rho.norm()) {
                break;
            }
        }
        let ok = last <= tol::<T>(1e-9, 1e3) * T::one().max(rho.norm());
        Ok(ok.then_some(rho * rho))
    }

    /// Change of `arg Δ` along `path(t)`, `t ∈ [0, 1]`; `None` when a zero
    /// sits on (or numerically at) the path.
    fn arg_path(&mut self, path: &dyn Fn(T) -> C<T>, segments: usize) -> Result<Option<T>> {
        let mut t0 = T::zero();
        let mut f0 = self.delta(path(t0))?;
        if f0.norm() == T::zero() {
            return Ok(None);
        }
        let mut total = T::zero();
        for s in 1..=segments {
            let t1 = T::of_usize(s) / T::of_usize(segments);
            let f1 = self.delta(path(t1))?;
            if f1.norm() == T::zero() {
                return Ok(None);
            }
            match self.arg_segment(path, t0, f0, t1, f1, 0)? {
                Some(v) => total = total + v,
                None => return Ok(None),
            }
            t0 = t1;
            f0 = f1;
        }
        Ok(Some(total))
    }

    fn arg_segment(
        &mut self,
        path: &dyn Fn(T) -> C<T>,
        ta: T,
        fa: C<T>,
        tb: T,
        fb: C<T>,
        depth: usize,
    ) -> Result<Option<T>> {
        let tm = (ta + tb) * T::of(0.5);
        let fm = self.delta(path(tm))?;
        if fm.norm() == T::zero() {
            return Ok(None);
        }
        let d1 = (fm / fa).arg();
        let d2 = (fb / fm).arg();
        let lim = T::FRAC_PI_4();
        if d1.abs() < lim && d2.abs() < lim {
            return Ok(Some(d1 + d2));
        }
        if depth >= 40 {
            return Ok(None);
        }
        let Some(left) = self.arg_segment(path, ta, fa, tm, fm, depth + 1)? else {
            return Ok(None);
        };
        let Some(right) = self.arg_segment(path, tm, fm, tb, fb, depth + 1)? else {
            return Ok(None);
        };
        Ok(Some(left + right))
    }

    fn edge(&mut self, a: C<T>, b: C<T>) -> Result<Option<T>> {
        if (a.re, a.im) > (b.re, b.im) {
            return Ok(self.edge(b, a)?.map(|v| -v));
        }
        let scale = T::one().max(a.norm().sqrt()).max(b.norm().sqrt());
        let segs = 4 + ((b - a).norm() * T::of(2.0) / scale).ceil().to_usize().unwrap_or(4);
        self.arg_path(&|t| a + (b - a) * t, segs)
    }

    /// Zero count inside the axis-aligned rectangle.
    fn rect_count(&mut self, x0: T, x1: T, y0: T, y1: T) -> Result<Option<i64>> {
        let corners = [cx(x0, y0), cx(x1, y0), cx(x1, y1), cx(x0, y1)];
        let mut total = T::zero();
        for i in 0..4 {
            match self.edge(corners[i], corners[(i + 1) % 4])? {
                Some(v) => total = total + v,
                None => return Ok(None),
            }
        }
        Ok((total / T::TAU()).round().to_i64())
    }

    /// Zeros in the box `[-L, L]²`, shifted off-center so that the integer
    /// eigenvalues of the model problems never sit on a cell edge.
    fn low_box(&mut self, half: T) -> Result<Vec<Root<T>>> {
        for jiggle in [0.0, 0.0123, -0.0217] {
            let j = T::of(jiggle);
            let x0 = -half * (T::of(1.0137) + j);
            let x1 = half * (T::of(1.0291) + j);
            let y0 = -half * (T::of(1.0173) - j);
            let y1 = half * (T::of(0.9871) + j);
            let n = 5;
            let xs: Vec<T> = (0..=n).map(|k| x0 + (x1 - x0) * T::of_usize(k) / T::of_usize(n)).collect();
            let ys: Vec<T> = (0..=n).map(|k| y0 + (y1 - y0) * T::of_usize(k) / T::of_usize(n)).collect();
            let mut out = Vec::new();
            let mut failed = false;
            'cells: for a in 0..n {
                for b in 0..n {
                    let cell = [xs[a], xs[a + 1], ys[b], ys[b + 1]];
                    match self.rect_count(cell[0], cell[1], cell[2], cell[3])? {
                        Some(c) if c > 0 => self.resolve(cell, c, &mut out, 0)?,
                        Some(_) => {}
                        None => {
                            failed = true;
                            break 'cells;
                        }
                    }
                }
            }
            if !failed {
                return Ok(out);
            }
        }
        Err(Error::NoConvergence("argument-principle scan of the low eigenvalue box".into()))
    }

    fn resolve(&mut self, cell: [T; 4], count: i64, out: &mut Vec<Root<T>>, depth: usize) -> Result<()> {
        let [x0, x1, y0, y1] = cell;
        let center = cx((x0 + x1) * T::of(0.5), (y0 + y1) * T::of(0.5));
        let size = (x1 - x0).max(y1 - y0);
        if count == 1 {
            if let Some(z) = self.newton_lambda(center)? {
                let slack = size * T::of(0.05);
                if z.re >= x0 - slack && z.re <= x1 + slack && z.im >= y0 - slack && z.im <= y1 + slack {
                    insert_root(out, Root { lambda: z, mult: 1 });
                    return Ok(());
                }
            }
        }
        if size < T::of(1e-3) * T::one().max(center.norm()) || depth > 60 {
            for r in self.cluster(center, size * T::of(0.75))? {
                insert_root(out, r);
            }
            return Ok(());
        }
        for (fx, fy) in [(0.4871, 0.5129), (0.5371, 0.4629)] {
            let xs = x0 + (x1 - x0) * T::of(fx);
            let ys = y0 + (y1 - y0) * T::of(fy);
            let subs = [[x0, xs, y0, ys], [xs, x1, y0, ys], [x0, xs, ys, y1], [xs, x1, ys, y1]];
            let mut counts = Vec::with_capacity(4);
            for s in &subs {
                match self.rect_count(s[0], s[1], s[2], s[3])? {
                    Some(c) => counts.push(c),
                    None => break,
                }
            }
            if counts.len() == 4 {
                for (s, c) in subs.iter().zip(counts) {
                    if c > 0 {
                        self.resolve(*s, c, out, depth + 1)?;
                    }
                }
                return Ok(());
            }
        }
        Err(Error::NoConvergence(format!("zero lies on the subdivision contour near {center}")))
    }

    /// Resolves the zeros inside a small circle from the contour moments of
    /// `Δ'/Δ`: either one multiple eigenvalue at the cluster mean or
    /// separately polished simple ones.
    fn cluster(&mut self, center: C<T>, radius: T) -> Result<Vec<Root<T>>> {
        let moments = cluster_power_sums(self.problem, center, radius, 8)?;
        let count = moments[0].re.round().to_usize().unwrap_or(0);
        if count == 0 {
            return Ok(Vec::new());
        }
        // Newton's identities: elementary symmetric functions of the shifted roots
        let mut e = vec![cr(T::one())];
        for k in 1..=count.min(moments.len() - 1) {
            let mut acc = cr(T::zero());
            for i in 1..=k {
                let term = e[k - i] * moments[i];
                acc = if i % 2 == 1 { acc + term } else { acc - term };
            }
            e.push(acc / T::of_usize(k));
        }
        let mean = center + moments[1] / T::of_usize(count);
        if count == 1 {
            return Ok(vec![Root { lambda: self.newton_lambda(mean)?.unwrap_or(mean), mult: 1 }]);
        }
        let mut coeffs = vec![cr(T::zero()); count + 1];
        for (k, ek) in e.iter().enumerate() {
            coeffs[count - k] = if k % 2 == 0 { *ek } else { -*ek };
        }
        let shifted = poly_roots(&coeffs).unwrap_or_default();
        let spread = shifted.iter().flat_map(|a| shifted.iter().map(move |b| (a - b).norm())).fold(T::zero(), T::max);
        if shifted.len() != count || spread <= T::of(CLUSTER_SPREAD) * T::one().max(mean.norm()) {
            return Ok(vec![Root { lambda: mean, mult: count }]);
        }
        let mut out = Vec::new();
        for w in shifted {
            let z = self.newton_lambda(center + w)?.unwrap_or(center + w);
            insert_root(&mut out, Root { lambda: z, mult: 1 });
        }
        Ok(out)
    }

    /// Compares the number of zeros inside a separating circle with the
    /// roots found there. `Err((expected, found, radius))` on disagreement.
    fn verify(&mut self, roots: &[Root<T>], n_max: usize) -> Result<std::result::Result<(), (i64, usize, f64)>> {
        let mut moduli: Vec<T> = roots.iter().flat_map(|r| std::iter::repeat_n(r.lambda.norm(), r.mult)).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if moduli.len() <= n_max {
            let r = moduli.last().copied().unwrap_or(T::one());
            return Ok(Err((n_max as i64 + 1, moduli.len(), r.to_f64().unwrap_or(0.0))));
        }
        let mut inside = n_max;
        while inside + 1 < moduli.len()
            && moduli[inside] - moduli[inside - 1] < T::of(0.05) * T::one().max(moduli[inside - 1])
        {
            inside += 1;
        }
        let base = (moduli[inside - 1] + moduli[inside]) * T::of(0.5);
        for shrink in [0.0, 0.01, -0.01] {
            let radius = base + (moduli[inside] - moduli[inside - 1]) * T::of(shrink);
            let segs = 32 + 8 * radius.sqrt().ceil().to_usize().unwrap_or(1);
            let path = |t: T| cx(radius * (T::TAU() * t).cos(), radius * (T::TAU() * t).sin());
            if let Some(total) = self.arg_path(&path, segs)? {
                let counted = (total / T::TAU()).round().to_i64().unwrap_or(-1);
                let found = moduli.iter().filter(|&&m| m < radius).count();
                return Ok(if counted == found as i64 {
                    Ok(())
                } else {
                    Err((counted, found, radius.to_f64().unwrap_or(0.0)))
                });
            }
        }
        Err(Error::NoConvergence("zero on the verification circle".into()))
    }
}

/// Shifted power sums `(1/2πi) ∮ (λ - c)^k Δ'(λ)/Δ(λ) dλ`, `k = 0..=kmax`,
/// over the circle `|λ - c| = radius` with 64 trapezoid nodes.
pub(crate) fn cluster_power_sums<T: Real>(
    problem: &BoundaryProblem<T>,
    center: C<T>,
    radius: T,
    kmax: usize,
) -> Result<Vec<C<T>>> {
    let nodes = 64;
    let mut sums = vec![cr(T::zero()); kmax + 1];
    for j in 0..nodes {
        let theta = T::TAU() * T::of_usize(j) / T::of_usize(nodes);
        let w = cx(radius * theta.cos(), radius * theta.sin());
        let (d, dd) = characteristic_with_derivative(problem, center + w)?;
        let mut f = dd / d * w;
        for s in sums.iter_mut() {
            *s = *s + f;
            f = f * w;
        }
    }
    Ok(sums.into_iter().map(|s| s / T::of_usize(nodes)).collect())
}
