use std::f64::consts::PI;

use nls_spectral::{Field, Grid};

/// Partition of unity `ψ₁ + ψ₂ = 1` with `ψ₂(x) = Ψ(δx)`, `δ = 4/a₀`.
/// Derivatives are stored analytically: `Ψ` is only C¹ at `±1`, so spectral
/// differentiation would ring.
#[derive(Debug, Clone)]
pub struct CutoffPair {
    pub psi1: Field,
    pub psi2: Field,
    /// `ψ₂′`; `ψ₁′ = -ψ₂′`.
    pub dpsi2: Field,
    /// `ψ₂″`, piecewise continuous.
    pub ddpsi2: Field,
    pub delta: f64,
}

impl CutoffPair {
    pub fn grid(&self) -> Grid {
        self.psi2.grid()
    }

    /// `max (ψ_j′)² / min(ψ_j, 1 - ψ_j)` over nodes where the denominator is positive.
    /// The sine step gives at most `δ²π²/4`.
    pub fn derivative_bound(&self) -> f64 {
        self.psi2
            .values()
            .iter()
            .zip(self.dpsi2.values())
            .filter_map(|(p, d)| {
                let m = p.re.min(1.0 - p.re);
                (m > 0.0).then(|| d.re * d.re / m)
            })
            .fold(0.0, f64::max)
    }
}

/// `(Ψ, Ψ′, Ψ″)` at `x`: 0 below -1, 1 above 1, `(1 + sin(πx/2))/2` between.
pub fn sine_step(x: f64) -> (f64, f64, f64) {
    if x <= -1.0 {
        (0.0, 0.0, 0.0)
    } else if x >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let s = 0.5 * PI * x;
        (0.5 * (1.0 + s.sin()), 0.25 * PI * s.cos(), -PI * PI / 8.0 * s.sin())
    }
}

pub fn make_cutoffs(a0: f64, grid: Grid) -> CutoffPair {
    assert!(a0 >= 3.0, "cutoffs need a₀ ≥ 3, got {a0}");
    let delta = 4.0 / a0;
    let psi2 = Field::from_real_fn(grid, |x| sine_step(delta * x).0);
    // ψ₁ is formed from the node values so that ψ₁ + ψ₂ = 1 holds exactly.
    let psi1 = psi2.map(|c| nls_spectral::C64::new(1.0 - c.re, 0.0));
    let dpsi2 = Field::from_real_fn(grid, |x| delta * sine_step(delta * x).1);
    let ddpsi2 = Field::from_real_fn(grid, |x| delta * delta * sine_step(delta * x).2);
    CutoffPair { psi1, psi2, dpsi2, ddpsi2, delta }
}
