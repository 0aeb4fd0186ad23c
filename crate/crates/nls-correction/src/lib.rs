//! Second-order correction `ν_z` to the two-soliton ansatz, built by pulling
//! each soliton back to the reference frame `(1, 0, 0, 0)` and inverting the
//! linearized operator `S` there, plus a residual check of
//! `∂_t ũ_z = JH′(ũ_z)` for `ũ_z = u_z + ν_z`.

mod operator;
mod source;

pub use operator::{
    reference_grid, s_apply_field, ReferenceOperator, KERNEL_REJECT, KERNEL_WARN, REFERENCE_L, REFERENCE_N,
    SOLVE_DEFECT,
};
pub use source::{build_source, build_source_rate, omegas, source_rate_value, source_value, SourceSummary, SourceTerm};

use nls_effective::{rhs_theorem, EffectiveState};
use nls_soliton::profile::sech_prime;
use nls_soliton::{group_apply, tangent_frame, two_soliton, Phase, SolitonError, SolitonParams, ZCoords};
use nls_spectral::{h1_norm, l2_norm, Field, Grid, C64, I};
use nls_symplectic::{complement, pairing_matrix, projection_coefficients, Frame, SymplecticError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorrectionError {
    #[error("ill-posed source: kernel component {kernel:.3e}·‖F‖")]
    IllPosed { kernel: f64 },
    #[error("solve defect {0:.3e} above tolerance")]
    SolveDefect(f64),
    #[error("state is not even/odd symmetric: {0}")]
    NotSymmetric(String),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Exponential weight `e^{0.9⟨x⟩}` of the decay certificates.
pub const DECAY_RATE: f64 = 0.9;
/// Half-width of the window on which weighted norms are evaluated. Beyond it
/// the weight amplifies round-off rather than the profile.
pub const DECAY_WINDOW: f64 = 20.0;

/// `‖e^{s⟨x⟩}u‖_{L²}` over `|x| ≤ DECAY_WINDOW`.
pub fn weighted_norm(u: &Field, s: f64) -> f64 {
    let g = u.grid();
    let sum: f64 = u
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| g.x(*j).abs() <= DECAY_WINDOW)
        .map(|(j, c)| {
            let x = g.x(j);
            (2.0 * s * (1.0 + x * x).sqrt()).exp() * c.norm_sqr()
        })
        .sum();
    (sum * g.dx()).sqrt()
}

/// `(Σ_{k≤2} ‖e^{s⟨x⟩}∂^k u‖²)^{1/2}` over the decay window.
pub fn weighted_h2_norm(u: &Field, s: f64) -> f64 {
    let (ux, uxx) = (u.derivative(), u.second_derivative());
    (weighted_norm(u, s).powi(2) + weighted_norm(&ux, s).powi(2) + weighted_norm(&uxx, s).powi(2)).sqrt()
}

/// A profile in the reference frame with its decay certificate.
#[derive(Debug, Clone)]
pub struct ReferenceProfile {
    pub field: Field,
    /// `‖e^{0.9⟨x⟩}ρ‖_{L²}` over the decay window.
    pub weighted_norm: f64,
    /// Whether a kernel component of the source was projected out.
    pub projected: bool,
}

impl ReferenceProfile {
    pub fn new(field: Field) -> Self {
        let weighted_norm = weighted_norm(&field, DECAY_RATE);
        Self { field, weighted_norm, projected: false }
    }
}

/// `S ρ` for a profile on a grid centred at the reference soliton.
pub fn s_apply(rho: &Field) -> Field {
    s_apply_field(rho)
}

/// `S⁻¹F` with the shared reference operator.
pub fn s_solve(f: &Field) -> Result<ReferenceProfile, CorrectionError> {
    ReferenceOperator::reference().solve(f)
}

/// `(∂̃_μφ, ∂̃_aφ, ∂̃_θφ, ∂̃_vφ) = (φ + xφ′, -φ′, iφ, ixφ)`.
pub fn reference_frame(grid: Grid) -> [Field; 4] {
    tangent_frame(&SolitonParams::REFERENCE, grid)
}

/// `J⁻¹ Π⊥₍₁,₀,₀,₀₎ J f` with `J = -i`.
pub fn reference_source(f: &Field) -> Result<Field, CorrectionError> {
    let frame = Frame::single(&SolitonParams::REFERENCE, f.grid());
    let a = pairing_matrix(&frame)?;
    Ok(complement(&frame, &a, &f.scale(-I)).scale(I))
}

/// Sign in front of `S⁻¹J⁻¹Π⊥Jf` in `ρ¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SourceSign {
    /// `+`: the sign that makes `ν_z` cancel `Π⊥JH′(u_z)`, since the
    /// interaction part of `H′(u_z)` is `-(η_j² conj(η_k) + 2|η_j|²η_k)`.
    #[default]
    Derived,
    /// `-`, as printed.
    Printed,
}

impl SourceSign {
    pub fn value(self) -> f64 {
        match self {
            SourceSign::Derived => 1.0,
            SourceSign::Printed => -1.0,
        }
    }
}

/// Amplitude `α_j` of `g_jρ_j` in `ν_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Amplitude {
    /// `α_j = μ_j⁻²`, the value the pullback requires.
    #[default]
    InverseSquare,
    /// `α_j = μ_j²`, as in the summary statement.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOptions {
    pub sign: SourceSign,
    pub amplitude: Amplitude,
    /// Include `ρ²`.
    pub second_order: bool,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self { sign: SourceSign::Derived, amplitude: Amplitude::InverseSquare, second_order: true }
    }
}

/// `(ρ¹_j, ρ²_j)`.
#[derive(Debug, Clone)]
pub struct RhoPair {
    pub rho1: ReferenceProfile,
    pub rho2: ReferenceProfile,
}

/// Phase case of an even/odd symmetric `z`, or an error if `z` is not symmetric.
pub fn symmetric_phase(z: &ZCoords) -> Result<Phase, CorrectionError> {
    let tol = 1e-12 * (1.0 + z.a2.abs());
    if (z.mu1 - z.mu2).abs() > tol || (z.a1 + z.a2).abs() > tol || (z.v1 + z.v2).abs() > tol {
        return Err(CorrectionError::NotSymmetric(format!("{z:?}")));
    }
    let d = (z.theta1 - z.theta2).rem_euclid(2.0 * PI);
    if d.min(2.0 * PI - d) < 1e-12 {
        Ok(Phase::In)
    } else if (d - PI).abs() < 1e-12 {
        Ok(Phase::Opposite)
    } else {
        Err(CorrectionError::NotSymmetric(format!("θ₁ - θ₂ = {d}")))
    }
}

/// `ż` of the reduced system lifted to the 8 coordinates of a symmetric `z`.
pub fn symmetric_velocity(z: &ZCoords) -> Result<[f64; 8], CorrectionError> {
    let sigma = symmetric_phase(z)?;
    let [m, a, t, v] = rhs_theorem(&EffectiveState::from_z(z, sigma));
    Ok([m, -a, m, a, t, -v, t, v])
}

/// `ż` defined by `Σ ż^ℓ ∂_ℓ u_z = Π_z JH′(u_z)`, computed on `grid`.
pub fn projected_velocity(z: &ZCoords, grid: Grid) -> Result<[f64; 8], CorrectionError> {
    let frame = Frame::two_soliton(z, grid);
    let a = pairing_matrix(&frame)?;
    let c = projection_coefficients(&frame, &a, &j_h_prime(&two_soliton(z, grid)));
    Ok(std::array::from_fn(|i| c[i]))
}

/// `JH′(u) = i(½u_xx + |u|²u)`.
pub fn j_h_prime(u: &Field) -> Field {
    let uxx = u.second_derivative();
    u.zip_with(&uxx, |a, b| I * (0.5 * b + a.norm_sqr() * a))
}

/// `ρ¹_j` and `ρ²_j` on the reference grid, with `∂_t f_j` taken along `zdot`.
pub fn build_rho_with(
    z: &ZCoords,
    j: usize,
    zdot: &[f64; 8],
    opts: &CorrectionOptions,
) -> Result<RhoPair, CorrectionError> {
    let op = ReferenceOperator::reference();
    let g = op.grid();
    let sign = opts.sign.value();
    let f = build_source(z, j, g);
    let rho1 = op.solve(&reference_source(&f.field)?)?;
    let rho1 = ReferenceProfile { field: rho1.field * sign, ..rho1 };
    let rho2 = if opts.second_order {
        let ft = build_source_rate(z, zdot, j, g);
        let r = op.solve(&reference_source(&ft)?)?;
        let mu = z.soliton(j).mu;
        op.solve(&r.field.scale(I * (sign / (mu * mu))))?
    } else {
        ReferenceProfile::new(Field::zeros(g))
    };
    Ok(RhoPair { rho1, rho2 })
}

/// [`build_rho_with`] for a symmetric `z` moving by the reduced system.
pub fn build_rho(z: &ZCoords, j: usize) -> Result<RhoPair, CorrectionError> {
    build_rho_with(z, j, &symmetric_velocity(z)?, &CorrectionOptions::default())
}

/// `ν_z` on a simulation grid, with its pieces.
#[derive(Debug, Clone)]
pub struct Correction {
    pub nu: Field,
    pub rho: [RhoPair; 2],
}

pub fn build_correction_with(
    z: &ZCoords,
    zdot: &[f64; 8],
    grid: Grid,
    opts: &CorrectionOptions,
) -> Result<Correction, CorrectionError> {
    let mut nu = Field::zeros(grid);
    let mut pairs = Vec::with_capacity(2);
    for j in [1, 2] {
        let pair = build_rho_with(z, j, zdot, opts)?;
        let p = z.soliton(j);
        let alpha = match opts.amplitude {
            Amplitude::InverseSquare => 1.0 / (p.mu * p.mu),
            Amplitude::Square => p.mu * p.mu,
        };
        let rho = &pair.rho1.field + &pair.rho2.field;
        nu += &(group_apply(&p, &rho, grid)? * alpha);
        pairs.push(pair);
    }
    let [r1, r2]: [RhoPair; 2] = pairs.try_into().expect("two solitons");
    Ok(Correction { nu, rho: [r1, r2] })
}

/// `ν_z` for a symmetric `z` moving by the reduced system.
pub fn build_correction(z: &ZCoords, grid: Grid) -> Result<Field, CorrectionError> {
    Ok(build_correction_with(z, &symmetric_velocity(z)?, grid, &CorrectionOptions::default())?.nu)
}

/// Result of a residual evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    /// `‖Σ ż^ℓ ∂_ℓ ũ_z - JH′(ũ_z)‖_{H¹}`.
    pub residual: f64,
    /// `‖ν_z‖_{H¹}` (0 when the correction is omitted).
    pub nu_h1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    pub include_correction: bool,
    pub correction: CorrectionOptions,
    /// Largest parameter change of a finite-difference stencil point.
    pub fd_reach: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { include_correction: true, correction: CorrectionOptions::default(), fd_reach: 0.02 }
    }
}

/// Central weights of the eighth-order first-derivative stencil.
const FD8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Residual norm of `∂_t ũ_z = JH′(ũ_z)` along `zdot`; see [`residual_field`].
///
/// `Σż^ℓ∂_ℓu_z` is taken from the analytic frame. For `ν_z` the common phase
/// rate `ż_g = ½(θ̇₁ + θ̇₂)` contributes exactly `ż_g·iν_z`; the remaining,
/// slow part of `ż` is differentiated with an eighth-order stencil.
pub fn residual_with(
    z: &ZCoords,
    zdot: &[f64; 8],
    grid: Grid,
    opts: &ResidualOptions,
) -> Result<Residual, CorrectionError> {
    let (r, nu_h1) = residual_field(z, zdot, grid, opts)?;
    Ok(Residual { residual: h1_norm(&r), nu_h1 })
}

/// The residual field `Σ ż^ℓ ∂_ℓ ũ_z - JH′(ũ_z)` and `‖ν_z‖_{H¹}`.
pub fn residual_field(
    z: &ZCoords,
    zdot: &[f64; 8],
    grid: Grid,
    opts: &ResidualOptions,
) -> Result<(Field, f64), CorrectionError> {
    let frame = Frame::two_soliton(z, grid);
    let mut lhs = Field::zeros(grid);
    for (c, d) in zdot.iter().zip(&frame.fields) {
        lhs.axpy((*c).into(), d);
    }
    let mut u = two_soliton(z, grid);
    let mut nu_h1 = 0.0;
    if opts.include_correction {
        let nu_at = |zz: &ZCoords| build_correction_with(zz, zdot, grid, &opts.correction).map(|c| c.nu);
        let nu = nu_at(z)?;
        let gauge = 0.5 * (zdot[4] + zdot[6]);
        lhs += &nu.scale(C64::new(0.0, gauge));
        let mut slow = *zdot;
        slow[4] -= gauge;
        slow[6] -= gauge;
        let size = slow.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if size > 0.0 {
            let eps = opts.fd_reach / size;
            let base = z.to_array();
            let at = |s: f64| ZCoords::from_array(std::array::from_fn(|i| base[i] + s * slow[i]));
            let mut d = Field::zeros(grid);
            for (k, w) in FD8.iter().enumerate() {
                let s = (k + 1) as f64 * eps;
                d += &((nu_at(&at(s))? - nu_at(&at(-s))?) * *w);
            }
            lhs += &(d * (1.0 / eps));
        }
        nu_h1 = h1_norm(&nu);
        u += &nu;
    }
    Ok((lhs - j_h_prime(&u), nu_h1))
}

pub fn residual(z: &ZCoords, zdot: &[f64; 8], grid: Grid) -> Result<Residual, CorrectionError> {
    residual_with(z, zdot, grid, &ResidualOptions::default())
}

/// `|<ν, J⁻¹∂_ℓ u_z>| / (‖ν‖ ‖∂_ℓ u_z‖)` for every frame direction.
pub fn orthogonality_defects(nu: &Field, z: &ZCoords) -> [f64; 8] {
    let frame = Frame::two_soliton(z, nu.grid());
    let n = l2_norm(nu);
    std::array::from_fn(|l| {
        let d = &frame.fields[l];
        nls_spectral::symplectic_pair(nu, d).abs() / (n * l2_norm(d))
    })
}

/// `φ′` on `grid`, the kernel direction of the real block.
pub fn kernel_translation(grid: Grid) -> Field {
    Field::from_real_fn(grid, sech_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nls_soliton::embed_symmetric;

    #[test]
    fn symmetry_detection() {
        for sigma in Phase::both() {
            let z = embed_symmetric(1.01, 5.0, 0.3, 0.002, sigma);
            assert_eq!(symmetric_phase(&z).unwrap(), sigma);
            let zd = symmetric_velocity(&z).unwrap();
            assert_eq!(zd[4], zd[6]);
            assert_eq!(zd[1], -zd[3]);
        }
        let z = ZCoords::from_array([1.0, -5.0, 1.0, 5.2, 0.0, 0.0, 0.0, 0.0]);
        assert!(symmetric_phase(&z).is_err());
    }

    #[test]
    fn weighted_norm_of_exponential() {
        let g = Grid::new(2048, 80.0).unwrap();
        let u = Field::from_real_fn(g, |x| (-(1.0 + x * x).sqrt()).exp());
        // ∫_{-20}^{20} e^{-0.2⟨x⟩} dx, by direct quadrature on a finer sum.
        let m = 200_000;
        let h = 40.0 / m as f64;
        let exact: f64 = (0..m).map(|k| (-0.2 * (1.0 + (-20.0 + (k as f64 + 0.5) * h).powi(2)).sqrt()).exp() * h).sum();
        let w = weighted_norm(&u, 0.9);
        assert!((w * w / exact - 1.0).abs() < 5e-3, "{} {}", w * w, exact);
    }
}
