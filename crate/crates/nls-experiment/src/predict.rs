//! Reduced-dynamics predictions `z̃(t)`, advanced on demand between samples.

use nls_effective::{
    closed_form, rhs_general, rhs_reduced_with, rhs_theorem_with, rk4_step, EffectiveState, RhsOptions,
};
use nls_soliton::{Phase, ZCoords};

use crate::{ExperimentError, OdeVariant};

/// Largest RK4 step used between samples.
pub const MAX_ODE_STEP: f64 = 0.05;

#[derive(Debug, Clone)]
enum State {
    Symmetric([f64; 4]),
    General([f64; 8]),
    /// `(t, θ)`; everything else is closed form.
    Closed([f64; 2]),
}

#[derive(Debug, Clone)]
pub struct Predictor {
    variant: OdeVariant,
    a0: f64,
    sigma: Phase,
    opts: RhsOptions,
    t: f64,
    state: State,
}

/// `μ` from the first integral `μ + 4(-1)^σ a e^{-2a}` of the theorem system.
pub fn mu_from_invariant(a0: f64, sigma: Phase, a: f64) -> f64 {
    1.0 + 4.0 * sigma.sign() * (a0 * (-2.0 * a0).exp() - a * (-2.0 * a).exp())
}

impl Predictor {
    /// Starts at the theorem's initialization `(μ, a, θ, v) = (1, a₀, 0, 0)`.
    pub fn new(variant: OdeVariant, a0: f64, sigma: Phase, opts: RhsOptions) -> Self {
        let init = EffectiveState::initial(a0, sigma);
        let state = match variant {
            OdeVariant::Theorem | OdeVariant::Reduced => State::Symmetric(init.to_array()),
            OdeVariant::General => State::General(init.embed().to_array()),
            OdeVariant::ClosedForm => State::Closed([0.0, 0.0]),
        };
        Self { variant, a0, sigma, opts, t: 0.0, state }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Integrates to `t` (not before the current time) and returns `z̃(t)`.
    pub fn advance(&mut self, t: f64) -> Result<ZCoords, ExperimentError> {
        if t < self.t {
            return Err(ExperimentError::Config(format!("predictor cannot go back from {} to {t}", self.t)));
        }
        let span = t - self.t;
        let n = (span / MAX_ODE_STEP).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        let (sigma, opts, a0, variant, t0) = (self.sigma, self.opts, self.a0, self.variant, self.t);
        if span > 0.0 {
            match &mut self.state {
                State::Symmetric(y) => {
                    let f = |y: &[f64; 4]| {
                        let s = EffectiveState::new(y[0], y[1], y[2], y[3], sigma);
                        match variant {
                            OdeVariant::Reduced => rhs_reduced_with(&s, &opts),
                            _ => rhs_theorem_with(&s, &opts),
                        }
                    };
                    for _ in 0..n {
                        *y = rk4_step(&f, y, dt);
                    }
                }
                State::General(y) => {
                    // Quadrature failures surface after the step.
                    let failed = std::cell::Cell::new(None);
                    let f = |y: &[f64; 8]| match rhs_general(&ZCoords::from_array(*y)) {
                        Ok(r) => r,
                        Err(e) => {
                            failed.set(Some(e.to_string()));
                            [f64::NAN; 8]
                        }
                    };
                    for _ in 0..n {
                        *y = rk4_step(&f, y, dt);
                        if let Some(e) = failed.take() {
                            return Err(ExperimentError::Numerical(format!("general ODE after t = {t0}: {e}")));
                        }
                    }
                }
                State::Closed(y) => {
                    let f = |y: &[f64; 2]| {
                        let (a, v) = closed_form(a0, sigma, y[0]).unwrap_or((f64::NAN, f64::NAN));
                        let mu = mu_from_invariant(a0, sigma, a);
                        let s = EffectiveState::new(mu, a, y[1], v, sigma);
                        [1.0, rhs_theorem_with(&s, &opts)[2]]
                    };
                    for _ in 0..n {
                        *y = rk4_step(&f, y, dt);
                    }
                }
            }
        }
        self.t = t;
        self.current()
    }

    /// `z̃` at the current time.
    pub fn current(&self) -> Result<ZCoords, ExperimentError> {
        let z = match &self.state {
            State::Symmetric(y) => EffectiveState::new(y[0], y[1], y[2], y[3], self.sigma).embed(),
            State::General(y) => ZCoords::from_array(*y),
            State::Closed(y) => {
                let (a, v) = closed_form(self.a0, self.sigma, self.t)
                    .map_err(|e| ExperimentError::Numerical(e.to_string()))?;
                let mu = mu_from_invariant(self.a0, self.sigma, a);
                EffectiveState::new(mu, a, y[1], v, self.sigma).embed()
            }
        };
        if !z.to_array().iter().all(|c| c.is_finite()) {
            return Err(ExperimentError::Numerical(format!("{:?} prediction is not finite at t = {}", self.variant, self.t)));
        }
        Ok(z)
    }
}
