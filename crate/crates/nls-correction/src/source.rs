//! Interaction sources pulled back to the reference frame of soliton `j`:
//! `f_j = g_j⁻¹[(g_jφ)² conj(g_kφ) + 2|g_jφ|² g_kφ]`, `k = 3 - j`.
//!
//! Evaluating the definition gives
//! `f_j(y) = μ_jμ_k [e^{i(ω₁+ω₂y)} + 2e^{i(ω₃+ω₄y)}] φ(y)² φ(μ_k(a_j - a_k) + μ_k y/μ_j)`
//! with `ω₃ = -ω₁`, `ω₄ = -ω₂`.

use log::warn;
use nls_soliton::profile::{sech, sech_prime};
use nls_soliton::{SolitonParams, ZCoords};
use nls_spectral::{Field, Grid, C64, I};
use serde::Serialize;

use crate::weighted_norm;

/// `f_j` with its phase parameters.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub j: usize,
    pub field: Field,
    /// `(ω₁, ω₂, ω₃, ω₄)`.
    pub omegas: [f64; 4],
    /// `‖e^{0.9⟨x⟩} f‖_{L²}` over the decay window.
    pub weighted_norm: f64,
}

/// `(ω₁, ω₂, ω₃, ω₄)` for soliton `j`.
pub fn omegas(z: &ZCoords, j: usize) -> [f64; 4] {
    let (pj, pk) = (z.soliton(j), z.soliton(3 - j));
    let w1 = pj.theta - pk.theta - pk.v * (pj.a - pk.a) / pk.mu;
    let w2 = pj.v / (pj.mu * pj.mu) - pk.v / (pj.mu * pk.mu);
    [w1, w2, -w1, -w2]
}

fn pieces(pj: &SolitonParams, pk: &SolitonParams, y: f64) -> (f64, f64, f64) {
    let s = pk.mu * (pj.a - pk.a) + pk.mu * y / pj.mu;
    (sech(y).powi(2), s, pj.mu * pk.mu)
}

/// `f_j(y)`.
pub fn source_value(z: &ZCoords, j: usize, y: f64) -> C64 {
    let (pj, pk) = (z.soliton(j), z.soliton(3 - j));
    let [w1, w2, w3, w4] = omegas(z, j);
    let (p2, s, amp) = pieces(&pj, &pk, y);
    let ph = C64::from_polar(1.0, w1 + w2 * y) + 2.0 * C64::from_polar(1.0, w3 + w4 * y);
    ph * (amp * p2 * sech(s))
}

/// `∂_t f_j(y) = Σ_ℓ ż^ℓ ∂_{z^ℓ} f_j(y)`, by the chain rule.
pub fn source_rate_value(z: &ZCoords, zdot: &[f64; 8], j: usize, y: f64) -> C64 {
    let k = 3 - j;
    let (pj, pk) = (z.soliton(j), z.soliton(k));
    let dj = SolitonParams::from_array(ZCoords::indices(j).map(|i| zdot[i]));
    let dk = SolitonParams::from_array(ZCoords::indices(k).map(|i| zdot[i]));
    let [w1, w2, _, _] = omegas(z, j);
    let d = pj.a - pk.a;
    let dd = dj.a - dk.a;
    let w1_t = dj.theta - dk.theta - (dk.v * d + pk.v * dd) / pk.mu + pk.v * d * dk.mu / (pk.mu * pk.mu);
    let w2_t = dj.v / (pj.mu * pj.mu) - 2.0 * pj.v * dj.mu / pj.mu.powi(3) - dk.v / (pj.mu * pk.mu)
        + pk.v * (dj.mu / pj.mu + dk.mu / pk.mu) / (pj.mu * pk.mu);
    let (p2, s, amp) = pieces(&pj, &pk, y);
    let amp_t = dj.mu * pk.mu + pj.mu * dk.mu;
    let s_t = dk.mu * d + pk.mu * dd + y * (dk.mu / pj.mu - pk.mu * dj.mu / (pj.mu * pj.mu));
    let e = C64::from_polar(1.0, w1 + w2 * y);
    let sum = e + 2.0 * e.conj();
    let diff = e - 2.0 * e.conj();
    (amp_t * sum + I * (amp * (w1_t + w2_t * y)) * diff) * (p2 * sech(s)) + sum * (amp * p2 * sech_prime(s) * s_t)
}

/// `f_j` sampled on `grid` (normally the reference grid).
pub fn build_source(z: &ZCoords, j: usize, grid: Grid) -> SourceTerm {
    assert!(j == 1 || j == 2, "soliton index must be 1 or 2");
    let field = Field::from_fn(grid, |y| source_value(z, j, y));
    let wn = weighted_norm(&field, crate::DECAY_RATE);
    let sep = z.separation();
    let scale = (-sep).exp() * (1.0 + sep).powi(2);
    if wn > 100.0 * scale {
        warn!("source f_{j} weighted norm {wn:.3e} exceeds 100·e^(-d)(1+d)² = {:.3e}", 100.0 * scale);
    }
    SourceTerm { j, field, omegas: omegas(z, j), weighted_norm: wn }
}

/// `∂_t f_j` sampled on `grid`.
pub fn build_source_rate(z: &ZCoords, zdot: &[f64; 8], j: usize, grid: Grid) -> Field {
    Field::from_fn(grid, |y| source_rate_value(z, zdot, j, y))
}

/// Summary of a source term for reports.
#[derive(Debug, Clone, Serialize)]
pub struct SourceSummary {
    pub j: usize,
    pub omegas: [f64; 4],
    pub weighted_norm: f64,
}

impl From<&SourceTerm> for SourceSummary {
    fn from(s: &SourceTerm) -> Self {
        Self { j: s.j, omegas: s.omegas, weighted_norm: s.weighted_norm }
    }
}
