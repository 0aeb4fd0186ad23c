//! Finite-dimensional dynamics of two interacting solitons: the symmetric
//! reduced equations with their closed-form solutions, the general eight
//! dimensional system driven by the tail interaction `<H_p′(η₂), η₁>`, and the
//! Fourier integrals `α`, `β` behind the reduced coefficients.

mod interaction;
mod ode;
pub mod quadrature;

pub use interaction::{
    alpha, beta, interaction_gradient, interaction_integral, rhs_general, rhs_general_with, InteractionValue,
    Mode,
};
pub use ode::{integrate, rk4_step, OdeTrajectory};

use nls_soliton::{embed_symmetric, Phase, SymmetricState, ZCoords};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EffectiveError {
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {err:.3e})")]
    Quadrature { a: f64, b: f64, err: f64 },
    #[error("collision time exceeded: 2ht = {0} >= π/2")]
    CollisionTime(f64),
    #[error("solitons too close: |a2 - a1| = {0} < 2")]
    TooClose(f64),
    #[error("integrator settings out of range: {0}")]
    Settings(String),
    #[error("state blew up after t = {t_last}")]
    BlowUp { t_last: f64 },
}

/// Reduced state `(μ, a, θ, v)` of a symmetric pair with phase case `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveState {
    pub mu: f64,
    pub a: f64,
    pub theta: f64,
    pub v: f64,
    pub sigma: Phase,
}

impl EffectiveState {
    pub fn new(mu: f64, a: f64, theta: f64, v: f64, sigma: Phase) -> Self {
        Self { mu, a, theta, v, sigma }
    }

    /// The theorem's initialization `(1, a₀, 0, 0)`.
    pub fn initial(a0: f64, sigma: Phase) -> Self {
        Self::new(1.0, a0, 0.0, 0.0, sigma)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.mu, self.a, self.theta, self.v]
    }

    pub fn with_array(&self, s: [f64; 4]) -> Self {
        Self::new(s[0], s[1], s[2], s[3], self.sigma)
    }

    pub fn embed(&self) -> ZCoords {
        embed_symmetric(self.mu, self.a, self.theta, self.v, self.sigma)
    }

    /// Reads back the symmetric coordinates of `z` (soliton 2 carries `(μ, a, θ, v)`).
    pub fn from_z(z: &ZCoords, sigma: Phase) -> Self {
        Self::new(0.5 * (z.mu1 + z.mu2), 0.5 * (z.a2 - z.a1), z.theta2, 0.5 * (z.v2 - z.v1), sigma)
    }
}

impl From<SymmetricState> for EffectiveState {
    fn from(s: SymmetricState) -> Self {
        Self::new(s.mu, s.a, s.theta, s.v, s.sigma)
    }
}

/// Coefficient `c` of the interaction term `c(-1)^σ e^{-2a}` in `θ̇`.
pub const THETA_COUPLING: f64 = 6.0;
/// The coefficient as printed in the source of the reduced equations.
pub const THETA_COUPLING_PRINTED: f64 = 18.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaCoupling {
    /// `6(-1)^σ e^{-2a}`, the value obtained by differentiating the interaction integral.
    #[default]
    Derived,
    /// `18(-1)^σ e^{-2a}`.
    Printed,
}

impl ThetaCoupling {
    pub fn value(self) -> f64 {
        match self {
            ThetaCoupling::Derived => THETA_COUPLING,
            ThetaCoupling::Printed => THETA_COUPLING_PRINTED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RhsOptions {
    pub coupling: ThetaCoupling,
    /// Replace `μ` by 1 in the `θ̇` equation (ablation).
    pub freeze_mu_in_theta: bool,
}

/// `(μ̇, ȧ, θ̇, v̇)` of the reduced system with `ȧ = v`.
pub fn rhs_theorem(s: &EffectiveState) -> [f64; 4] {
    rhs_theorem_with(s, &RhsOptions::default())
}

pub fn rhs_theorem_with(s: &EffectiveState, opts: &RhsOptions) -> [f64; 4] {
    let sg = s.sigma.sign();
    let e = (-2.0 * s.a).exp();
    let m = if opts.freeze_mu_in_theta { 1.0 } else { s.mu };
    [
        sg * (8.0 * s.a - 4.0) * s.v * e,
        s.v,
        0.5 * m * m + 0.5 * s.v * s.v / (m * m) + opts.coupling.value() * sg * e,
        -4.0 * sg * e,
    ]
}

/// As [`rhs_theorem`] but with `ȧ = v/μ + (-1)^σ(-4a + 2π²/3) v e^{-2a}`.
pub fn rhs_reduced(s: &EffectiveState) -> [f64; 4] {
    rhs_reduced_with(s, &RhsOptions::default())
}

pub fn rhs_reduced_with(s: &EffectiveState, opts: &RhsOptions) -> [f64; 4] {
    let mut r = rhs_theorem_with(s, opts);
    let e = (-2.0 * s.a).exp();
    r[1] = s.v / s.mu + s.sigma.sign() * (-4.0 * s.a + 2.0 * PI * PI / 3.0) * s.v * e;
    r
}

/// Exact `(a, v)` of `ȧ = v, v̇ = -4(-1)^σ e^{-2a}` from `(a₀, 0)`.
pub fn closed_form(a0: f64, sigma: Phase, t: f64) -> Result<(f64, f64), EffectiveError> {
    let h = (-a0).exp();
    let s = 2.0 * h * t;
    match sigma {
        Phase::In => {
            if s.abs() >= 0.5 * PI {
                return Err(EffectiveError::CollisionTime(s));
            }
            Ok((a0 - (1.0 / s.cos()).ln(), -2.0 * h * s.tan()))
        }
        Phase::Opposite => Ok((a0 + s.cosh().ln(), 2.0 * h * s.tanh())),
    }
}

/// First integral `v² - 4(-1)^σ e^{-2a}` of the `(a, v)` system.
pub fn effective_energy(s: &EffectiveState) -> f64 {
    s.v * s.v - 4.0 * s.sigma.sign() * (-2.0 * s.a).exp()
}
