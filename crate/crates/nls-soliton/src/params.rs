use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters `(μ, a, θ, v)` of `η = e^{iθ} e^{iv(x-a)/μ} μ sech(μ(x-a))`.
/// `θ` is kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub mu: f64,
    pub a: f64,
    pub theta: f64,
    pub v: f64,
}

impl SolitonParams {
    pub const REFERENCE: SolitonParams = SolitonParams { mu: 1.0, a: 0.0, theta: 0.0, v: 0.0 };

    pub fn new(mu: f64, a: f64, theta: f64, v: f64) -> Self {
        Self { mu, a, theta, v }
    }

    pub fn is_valid(&self) -> bool {
        self.mu > 0.0 && [self.mu, self.a, self.theta, self.v].iter().all(|x| x.is_finite())
    }

    /// Component order `(μ, a, θ, v)`.
    pub fn to_array(self) -> [f64; 4] {
        [self.mu, self.a, self.theta, self.v]
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }

    /// Restricted Hamiltonian `H(η) = ½ v²/μ - μ³/6`.
    pub fn energy(&self) -> f64 {
        0.5 * self.v * self.v / self.mu - self.mu.powi(3) / 6.0
    }

    /// `(∂_μ H(η), ∂_v H(η))`.
    pub fn energy_partials(&self) -> (f64, f64) {
        let m = self.mu;
        (-0.5 * self.v * self.v / (m * m) - 0.5 * m * m, self.v / m)
    }
}

/// Two-soliton coordinates in the order `(μ₁, a₁, μ₂, a₂, θ₁, v₁, θ₂, v₂)`.
/// Indices `{0, 1, 4, 5}` belong to the left soliton and `{2, 3, 6, 7}` to the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZCoords {
    pub mu1: f64,
    pub a1: f64,
    pub mu2: f64,
    pub a2: f64,
    pub theta1: f64,
    pub v1: f64,
    pub theta2: f64,
    pub v2: f64,
}

/// Positions of `(μ, a, θ, v)` of soliton `j` inside the 8-vector.
pub const LEFT: [usize; 4] = [0, 1, 4, 5];
pub const RIGHT: [usize; 4] = [2, 3, 6, 7];

pub const LABELS: [&str; 8] = ["mu1", "a1", "mu2", "a2", "theta1", "v1", "theta2", "v2"];

impl ZCoords {
    pub fn from_array(z: [f64; 8]) -> Self {
        Self {
            mu1: z[0],
            a1: z[1],
            mu2: z[2],
            a2: z[3],
            theta1: z[4],
            v1: z[5],
            theta2: z[6],
            v2: z[7],
        }
    }

    pub fn to_array(self) -> [f64; 8] {
        [self.mu1, self.a1, self.mu2, self.a2, self.theta1, self.v1, self.theta2, self.v2]
    }

    pub fn from_pair(p1: SolitonParams, p2: SolitonParams) -> Self {
        Self {
            mu1: p1.mu,
            a1: p1.a,
            mu2: p2.mu,
            a2: p2.a,
            theta1: p1.theta,
            v1: p1.v,
            theta2: p2.theta,
            v2: p2.v,
        }
    }

    /// Soliton `j ∈ {1, 2}`.
    pub fn soliton(&self, j: usize) -> SolitonParams {
        match j {
            1 => SolitonParams::new(self.mu1, self.a1, self.theta1, self.v1),
            2 => SolitonParams::new(self.mu2, self.a2, self.theta2, self.v2),
            _ => panic!("soliton index must be 1 or 2, got {j}"),
        }
    }

    pub fn indices(j: usize) -> [usize; 4] {
        match j {
            1 => LEFT,
            2 => RIGHT,
            _ => panic!("soliton index must be 1 or 2, got {j}"),
        }
    }

    pub fn separation(&self) -> f64 {
        (self.a2 - self.a1).abs()
    }

    pub fn is_valid(&self) -> bool {
        self.mu1 > 0.0 && self.mu2 > 0.0 && self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Relative phase of the two solitons: `σ = 0` in phase, `σ = 1` opposite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Phase {
    In,
    Opposite,
}

impl Phase {
    pub fn index(self) -> u8 {
        match self {
            Phase::In => 0,
            Phase::Opposite => 1,
        }
    }

    /// `(-1)^σ`.
    pub fn sign(self) -> f64 {
        match self {
            Phase::In => 1.0,
            Phase::Opposite => -1.0,
        }
    }

    pub fn both() -> [Phase; 2] {
        [Phase::In, Phase::Opposite]
    }
}

impl TryFrom<u8> for Phase {
    type Error = String;
    fn try_from(s: u8) -> Result<Self, String> {
        match s {
            0 => Ok(Phase::In),
            1 => Ok(Phase::Opposite),
            _ => Err(format!("sigma must be 0 or 1, got {s}")),
        }
    }
}

impl From<Phase> for u8 {
    fn from(p: Phase) -> u8 {
        p.index()
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Symmetric two-soliton state: soliton 2 at `(μ, a, θ, v)`, soliton 1 its mirror
/// image with phase shifted by `σπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricState {
    pub mu: f64,
    pub a: f64,
    pub theta: f64,
    pub v: f64,
    pub sigma: Phase,
    /// `e^{-a₀}` of the run this state belongs to.
    pub h: f64,
}

impl SymmetricState {
    pub fn initial(a0: f64, sigma: Phase) -> Self {
        Self { mu: 1.0, a: a0, theta: 0.0, v: 0.0, sigma, h: (-a0).exp() }
    }

    pub fn embed(&self) -> ZCoords {
        embed_symmetric(self.mu, self.a, self.theta, self.v, self.sigma)
    }
}

/// `z = (μ, -a, μ, a, θ + σπ, -v, θ, v)`.
pub fn embed_symmetric(mu: f64, a: f64, theta: f64, v: f64, sigma: Phase) -> ZCoords {
    ZCoords {
        mu1: mu,
        a1: -a,
        mu2: mu,
        a2: a,
        theta1: theta + f64::from(sigma.index()) * PI,
        v1: -v,
        theta2: theta,
        v2: v,
    }
}
