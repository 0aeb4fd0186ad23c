//! The reference linearized operator
//! `S ρ = ½ρ - ½ρ_xx - 2φ²ρ - φ² conj(ρ)`, `φ = sech`.
//!
//! `S` is real-linear, not complex-linear. Writing `ρ = p + iq` it splits into
//! `L₊p = ½p - ½p_xx - 3φ²p` and `L₋q = ½q - ½q_xx - φ²q`, with kernels `φ′`
//! and `φ`. Each block is assembled as a dense real matrix with the spectral
//! second derivative, bordered by its kernel vector, and LU-factored once.

use std::sync::OnceLock;

use log::warn;
use nalgebra::{DMatrix, DVector, LU};
use nls_soliton::profile::{sech, sech_prime};
use nls_spectral::{inner, l2_norm, Field, Grid, C64, I};

use crate::{CorrectionError, ReferenceProfile};

/// Kernel components above this fraction of `‖F‖` are projected out with a warning.
pub const KERNEL_WARN: f64 = 1e-8;
/// Kernel components above this fraction of `‖F‖` are rejected.
pub const KERNEL_REJECT: f64 = 1e-4;
/// Largest accepted relative defect `‖Sρ - F‖ / ‖F‖` of a solve.
pub const SOLVE_DEFECT: f64 = 1e-8;

/// Points of the reference grid.
pub const REFERENCE_N: usize = 1024;
/// Length of the reference cell.
pub const REFERENCE_L: f64 = 80.0;

struct Block {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    kernel: DVector<f64>,
}

impl Block {
    /// `[[L, k], [kᵀ, 0]]` for `L = ½ - ½D₂ - c·φ²`.
    fn new(d2: &DMatrix<f64>, phi2: &[f64], c: f64, kernel: DVector<f64>) -> Self {
        let n = phi2.len();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = -0.5 * d2[(i, j)];
            }
            m[(i, i)] += 0.5 - c * phi2[i];
            m[(i, n)] = kernel[i];
            m[(n, i)] = kernel[i];
        }
        Self { lu: m.lu(), kernel }
    }

    /// The solution of `Lx = b - λk` with `x ⊥ k`.
    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = b.len();
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(b);
        let sol = self.lu.solve(&rhs).expect("bordered reference operator is singular");
        sol.rows(0, n).into_owned()
    }
}

/// `S` on a fixed reference grid, with both bordered blocks factored.
pub struct ReferenceOperator {
    grid: Grid,
    phi: Field,
    plus: Block,
    minus: Block,
}

impl std::fmt::Debug for ReferenceOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceOperator").field("grid", &self.grid).finish_non_exhaustive()
    }
}

/// Spectral second-derivative matrix; real, symmetric and circulant.
fn second_derivative_matrix(grid: Grid) -> DMatrix<f64> {
    let n = grid.n();
    let mut e0 = Field::zeros(grid);
    e0.values_mut()[0] = C64::new(1.0, 0.0);
    let col = e0.second_derivative();
    DMatrix::from_fn(n, n, |i, j| col.values()[(i + n - j) % n].re)
}

impl ReferenceOperator {
    pub fn new(grid: Grid) -> Self {
        let d2 = second_derivative_matrix(grid);
        let xs = grid.nodes();
        let phi2: Vec<f64> = xs.iter().map(|&x| sech(x).powi(2)).collect();
        let kp = DVector::from_iterator(grid.n(), xs.iter().map(|&x| sech_prime(x)));
        let km = DVector::from_iterator(grid.n(), xs.iter().map(|&x| sech(x)));
        Self {
            grid,
            phi: Field::from_real_fn(grid, sech),
            plus: Block::new(&d2, &phi2, 3.0, kp),
            minus: Block::new(&d2, &phi2, 1.0, km),
        }
    }

    /// The shared operator on the default reference grid (`L = 80`, `n = 1024`).
    pub fn reference() -> &'static ReferenceOperator {
        static CELL: OnceLock<ReferenceOperator> = OnceLock::new();
        CELL.get_or_init(|| ReferenceOperator::new(reference_grid()))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `φ` sampled on the reference grid.
    pub fn phi(&self) -> &Field {
        &self.phi
    }

    /// `S ρ`, spectrally.
    pub fn apply(&self, rho: &Field) -> Field {
        s_apply_field(rho)
    }

    /// `(<F, ∂̃_a φ>, <F, ∂̃_θ φ>)`, normalized by the kernel norms.
    pub fn kernel_components(&self, f: &Field) -> (f64, f64) {
        let da = Field::from_real_fn(self.grid, |x| -sech_prime(x));
        let dt = self.phi.scale(I);
        (inner(f, &da) / l2_norm(&da), inner(f, &dt) / l2_norm(&dt))
    }

    /// The minimum-norm `ρ ⊥ ker S` with `Sρ = F`.
    pub fn solve(&self, f: &Field) -> Result<ReferenceProfile, CorrectionError> {
        assert!(f.grid().same_as(&self.grid), "source is not on the reference grid");
        let norm = l2_norm(f);
        if norm == 0.0 {
            return Ok(ReferenceProfile::new(Field::zeros(self.grid)));
        }
        let (ka, kt) = self.kernel_components(f);
        let kernel = ka.abs().max(kt.abs()) / norm;
        if kernel > KERNEL_REJECT {
            return Err(CorrectionError::IllPosed { kernel });
        }
        let mut projected = false;
        if kernel > KERNEL_WARN {
            warn!("source has kernel component {kernel:.3e}·‖F‖; projecting it out");
            projected = true;
        }
        let re = DVector::from_iterator(self.grid.n(), f.values().iter().map(|c| c.re));
        let im = DVector::from_iterator(self.grid.n(), f.values().iter().map(|c| c.im));
        let p = self.plus.solve(&re);
        let q = self.minus.solve(&im);
        let rho = Field::from_values(self.grid, p.iter().zip(q.iter()).map(|(a, b)| C64::new(*a, *b)).collect());
        // The defect is measured against F with its kernel part removed.
        let target = self.deflate(f);
        let defect = l2_norm(&(self.apply(&rho) - &target)) / norm;
        if defect > SOLVE_DEFECT {
            return Err(CorrectionError::SolveDefect(defect));
        }
        let mut out = ReferenceProfile::new(rho);
        out.projected = projected;
        Ok(out)
    }

    /// `F` minus its components along `φ′` (real part) and `φ` (imaginary part).
    pub fn deflate(&self, f: &Field) -> Field {
        let project = |v: Vec<f64>, k: &DVector<f64>| {
            let kk = k.dot(k);
            let c = k.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / kk;
            v.iter().zip(k.iter()).map(|(x, kj)| x - c * kj).collect::<Vec<_>>()
        };
        let re = project(f.values().iter().map(|c| c.re).collect(), &self.plus.kernel);
        let im = project(f.values().iter().map(|c| c.im).collect(), &self.minus.kernel);
        Field::from_values(self.grid, re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
    }
}

pub fn reference_grid() -> Grid {
    Grid::new(REFERENCE_N, REFERENCE_L).expect("reference grid")
}

/// `½ρ - ½ρ_xx - 2φ²ρ - φ² conj(ρ)` on any grid centred at the origin.
pub fn s_apply_field(rho: &Field) -> Field {
    let rxx = rho.second_derivative();
    Field::from_values(
        rho.grid(),
        rho.values()
            .iter()
            .zip(rxx.values())
            .enumerate()
            .map(|(j, (r, rx))| {
                let p2 = sech(rho.grid().x(j)).powi(2);
                0.5 * r - 0.5 * rx - 2.0 * p2 * r - p2 * r.conj()
            })
            .collect(),
    )
}
