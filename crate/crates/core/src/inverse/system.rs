use super::tables::{kernel_d, ModelTables};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::real::{cr, Real, C};

/// Condition estimate above which the main equation counts as singular.
pub const TAU_CONDITION: f64 = 1e12;

/// `E + H̃(x)` and `ψ̃(x)` at one grid point.
///
/// Rows and columns follow the block order `(p, 0), (p, 1)` for each active
/// position `p`, i.e. flattened index `2p + i`.
#[derive(Debug, Clone)]
pub struct MainEquationSystem<T: Real> {
    pub x_index: usize,
    pub matrix: Matrix<T>,
    pub rhs: Vec<C<T>>,
    /// `δ_n` per active position, needed to map `ψ` back to `φ`.
    pub delta: Vec<T>,
}

/// Solution of one main-equation system.
#[derive(Debug, Clone)]
pub struct MainEquationSolution<T: Real> {
    pub psi: Vec<C<T>>,
    /// Recovered `φ_{ni}(x)` in the same flattened order.
    pub phi: Vec<C<T>>,
    pub condition: T,
    pub determinant: C<T>,
}

/// Assembles the system from kernel values `d(a, b) = D̃(x, λ_a, λ_b)` over
/// flattened columns.
pub(crate) fn assemble<T: Real>(
    tables: &ModelTables<T>,
    x_index: usize,
    d: impl Fn(usize, usize) -> C<T>,
) -> MainEquationSystem<T> {
    let k = tables.len();
    let mut matrix = Matrix::identity(2 * k);
    let mut rhs = Vec::with_capacity(2 * k);
    for n in 0..k {
        let chi = tables.chi(n);
        for q in 0..k {
            let (a0, a1) = (tables.alpha(q, 0), tables.alpha(q, 1));
            let q00 = a0 * d(2 * n, 2 * q);
            let q10 = a0 * d(2 * n + 1, 2 * q);
            let q01 = a1 * d(2 * n, 2 * q + 1);
            let q11 = a1 * d(2 * n + 1, 2 * q + 1);
            let delta = tables.delta(q);
            let diff0 = q00 - q10;
            let diff1 = q01 - q11;
            matrix[(2 * n, 2 * q)] = matrix[(2 * n, 2 * q)] + diff0 * (chi * delta);
            matrix[(2 * n, 2 * q + 1)] = matrix[(2 * n, 2 * q + 1)] + (diff0 - diff1) * chi;
            matrix[(2 * n + 1, 2 * q)] = matrix[(2 * n + 1, 2 * q)] + q10 * delta;
            matrix[(2 * n + 1, 2 * q + 1)] = matrix[(2 * n + 1, 2 * q + 1)] + (q10 - q11);
        }
        let (f0, f1) = (tables.phi(n, 0)[x_index], tables.phi(n, 1)[x_index]);
        rhs.push((f0 - f1) * chi);
        rhs.push(f1);
    }
    let delta = (0..k).map(|p| tables.delta(p)).collect();
    MainEquationSystem { x_index, matrix, rhs, delta }
}

/// Builds `E + H̃(x_j)` and `ψ̃(x_j)` with `H̃ = T Q̃ T⁻¹`,
/// `Q̃_{ni;kj} = α_{kj} D̃(x, λ_{ni}, λ_{kj})`.
pub fn build_main_equation<T: Real>(tables: &ModelTables<T>, x_index: usize) -> Result<MainEquationSystem<T>> {
    let n = 2 * tables.len();
    let mut cache = vec![cr(T::zero()); n * n];
    for a in 0..n {
        for b in a..n {
            let v = kernel_d(tables, x_index, (a / 2, a % 2), (b / 2, b % 2))?;
            cache[a * n + b] = v;
            cache[b * n + a] = v;
        }
    }
    Ok(assemble(tables, x_index, |a, b| cache[a * n + b]))
}

/// Dense LU solve followed by `φ_{n0} = δ_n ψ_{n0} + ψ_{n1}`, `φ_{n1} = ψ_{n1}`.
pub fn solve_main_equation<T: Real>(system: &MainEquationSystem<T>) -> Result<MainEquationSolution<T>> {
    let lu = Lu::new(system.matrix.clone());
    let condition = lu.condition_estimate();
    if lu.is_singular() || !(condition <= T::of(TAU_CONDITION)) {
        return Err(Error::SingularSystem {
            x_index: system.x_index,
            condition: condition.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let psi = lu.solve(&system.rhs);
    let phi = psi.chunks(2).zip(&system.delta).flat_map(|(p, &d)| [p[0] * d + p[1], p[1]]).collect();
    Ok(MainEquationSolution { psi, phi, condition, determinant: lu.determinant() })
}
