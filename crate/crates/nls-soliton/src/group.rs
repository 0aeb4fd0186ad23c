//! The parameter group acting on profiles:
//! `(gρ)(x) = e^{iθ} e^{iv(x-a)/μ} μ ρ(μ(x-a))`, with `g* = μ g⁻¹`.
//!
//! Analytic profiles are re-evaluated directly; sampled fields are resampled
//! with their band-limited interpolant.

use nls_spectral::{Field, Grid, C64};

use crate::{SolitonError, SolitonParams};

/// Spectral energy allowed beyond the target Nyquist wavenumber, relative to the total.
const ALIAS_TOLERANCE: f64 = 1e-20;

/// `gρ` for an analytic profile `ρ(y)`.
pub fn group_apply_fn(p: &SolitonParams, rho: impl Fn(f64) -> C64, grid: Grid) -> Field {
    Field::from_fn(grid, |x| {
        let y = x - p.a;
        C64::from_polar(p.mu, p.theta + p.v * y / p.mu) * rho(p.mu * y)
    })
}

/// `g⁻¹w` for an analytic `w(x)`: `μ⁻¹ e^{-iθ} e^{-ivy/μ²} w(a + y/μ)`.
pub fn group_inverse_fn(p: &SolitonParams, w: impl Fn(f64) -> C64, grid: Grid) -> Field {
    Field::from_fn(grid, |y| {
        C64::from_polar(1.0 / p.mu, -p.theta - p.v * y / (p.mu * p.mu)) * w(p.a + y / p.mu)
    })
}

/// Fraction of spectral energy of `u` that lands beyond `k_max` after the affine
/// wavenumber map `k ↦ scale·k + shift`.
fn alias_fraction(u: &Field, scale: f64, shift: f64, k_max: f64) -> f64 {
    let g = u.grid();
    let spec = u.spectrum();
    let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let lost: f64 = spec
        .iter()
        .enumerate()
        .filter(|(m, _)| (scale * g.wavenumber(*m) + shift).abs() > k_max)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    lost / total
}

fn check_bandwidth(u: &Field, scale: f64, shift: f64, target: Grid) -> Result<(), SolitonError> {
    let fraction = alias_fraction(u, scale, shift, target.k_max());
    if fraction > ALIAS_TOLERANCE {
        return Err(SolitonError::Bandwidth { fraction });
    }
    Ok(())
}

/// `gρ` resampled onto `target`.
pub fn group_apply(p: &SolitonParams, rho: &Field, target: Grid) -> Result<Field, SolitonError> {
    check_bandwidth(rho, p.mu, p.v / p.mu, target)?;
    let ys: Vec<f64> = (0..target.n()).map(|j| p.mu * (target.x(j) - p.a)).collect();
    let vals = rho.interpolate(&ys);
    Ok(Field::from_values(
        target,
        (0..target.n())
            .map(|j| {
                let y = target.x(j) - p.a;
                C64::from_polar(p.mu, p.theta + p.v * y / p.mu) * vals[j]
            })
            .collect(),
    ))
}

/// `g⁻¹w` resampled onto `target` (normally the reference grid).
pub fn group_inverse(p: &SolitonParams, w: &Field, target: Grid) -> Result<Field, SolitonError> {
    check_bandwidth(w, 1.0 / p.mu, -p.v / (p.mu * p.mu), target)?;
    let xs: Vec<f64> = (0..target.n()).map(|j| p.a + target.x(j) / p.mu).collect();
    let vals = w.interpolate(&xs);
    Ok(Field::from_values(
        target,
        (0..target.n())
            .map(|j| {
                let y = target.x(j);
                C64::from_polar(1.0 / p.mu, -p.theta - p.v * y / (p.mu * p.mu)) * vals[j]
            })
            .collect(),
    ))
}

/// `g*w = μ g⁻¹w`.
pub fn group_adjoint(p: &SolitonParams, w: &Field, target: Grid) -> Result<Field, SolitonError> {
    Ok(group_inverse(p, w, target)? * p.mu)
}
