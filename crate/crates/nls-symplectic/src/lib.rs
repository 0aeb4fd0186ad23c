//! Symplectic geometry of the soliton manifolds: pairing matrices
//! `a_{ℓm} = ω(∂_ℓ u, ∂_m u)`, the projection `Π` onto the tangent space along
//! its symplectic complement, and the modulation decomposition `u = u_z + w`.

mod decompose;

pub use decompose::{decompose, DecomposeOptions, Decomposition};

use nalgebra::{DMatrix, DVector};
use nls_soliton::{tangent_frame, SolitonParams, ZCoords, LABELS};
use nls_spectral::{symplectic_pair, Field, Grid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("degenerate frame: condition number {0:.3e}")]
    Degenerate(f64),
    #[error("frame must have 4 or 8 fields, got {0}")]
    FrameSize(usize),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("left the two-soliton manifold: {0}")]
    LeftManifold(String),
}

/// Tangent fields `∂_{z^ℓ} u` with their labels.
#[derive(Debug, Clone)]
pub struct Frame {
    pub fields: Vec<Field>,
    pub labels: Vec<&'static str>,
}

impl Frame {
    pub fn new(fields: Vec<Field>, labels: Vec<&'static str>) -> Result<Self, SymplecticError> {
        if fields.len() != 4 && fields.len() != 8 {
            return Err(SymplecticError::FrameSize(fields.len()));
        }
        assert_eq!(fields.len(), labels.len());
        let g = fields[0].grid();
        assert!(fields.iter().all(|f| f.grid().same_as(&g)), "frame fields on different grids");
        Ok(Self { fields, labels })
    }

    /// `(∂_μη, ∂_aη, ∂_θη, ∂_vη)`.
    pub fn single(p: &SolitonParams, grid: Grid) -> Self {
        Self { fields: tangent_frame(p, grid).into(), labels: vec!["mu", "a", "theta", "v"] }
    }

    /// The 8 fields `∂_{z^ℓ} u_z` in z order.
    pub fn two_soliton(z: &ZCoords, grid: Grid) -> Self {
        let [m1, a1, t1, v1] = tangent_frame(&z.soliton(1), grid);
        let [m2, a2, t2, v2] = tangent_frame(&z.soliton(2), grid);
        Self { fields: vec![m1, a1, m2, a2, t1, v1, t2, v2], labels: LABELS.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn grid(&self) -> Grid {
        self.fields[0].grid()
    }

    /// `(ω(f, ∂_ℓ u))_ℓ = (<f, J⁻¹∂_ℓ u>)_ℓ`.
    pub fn pairings(&self, f: &Field) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.fields.iter().map(|d| symplectic_pair(f, d)))
    }
}

/// Antisymmetric `A` with its inverse and 2-norm condition number.
#[derive(Debug, Clone)]
pub struct PairingMatrix {
    pub entries: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub cond: f64,
}

const MAX_COND: f64 = 1e8;

impl PairingMatrix {
    pub fn from_entries(entries: DMatrix<f64>) -> Result<Self, SymplecticError> {
        let sv = entries.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(cond <= MAX_COND) {
            return Err(SymplecticError::Degenerate(cond));
        }
        let inverse = entries.clone().try_inverse().ok_or(SymplecticError::Degenerate(cond))?;
        Ok(Self { entries, inverse, cond })
    }
}

/// `a_{ℓm} = <∂_ℓ u, J⁻¹∂_m u>`; only the upper triangle is computed, so `A + Aᵀ = 0` exactly.
pub fn pairing_matrix(frame: &Frame) -> Result<PairingMatrix, SymplecticError> {
    let k = frame.len();
    let mut a = DMatrix::zeros(k, k);
    for l in 0..k {
        for m in l + 1..k {
            let v = symplectic_pair(&frame.fields[l], &frame.fields[m]);
            a[(l, m)] = v;
            a[(m, l)] = -v;
        }
    }
    PairingMatrix::from_entries(a)
}

/// Coefficients `c_m = Σ_ℓ <f, J⁻¹∂_ℓ u> a^{ℓm}` of `Π f = Σ_m c_m ∂_m u`.
pub fn projection_coefficients(frame: &Frame, a: &PairingMatrix, f: &Field) -> DVector<f64> {
    a.inverse.transpose() * frame.pairings(f)
}

/// `Π f`, the part of `f` in the span of the frame along the symplectic complement.
pub fn project(frame: &Frame, a: &PairingMatrix, f: &Field) -> Field {
    let c = projection_coefficients(frame, a, f);
    let mut out = Field::zeros(f.grid());
    for (cm, d) in c.iter().zip(&frame.fields) {
        out.axpy((*cm).into(), d);
    }
    out
}

/// `Π⊥ f = f - Π f`.
pub fn complement(frame: &Frame, a: &PairingMatrix, f: &Field) -> Field {
    f - project(frame, a, f)
}
