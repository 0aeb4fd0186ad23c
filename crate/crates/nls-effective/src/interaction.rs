use nls_soliton::{profile::sech, SolitonParams, ZCoords, LEFT, RIGHT};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate, integrate_real, QuadOptions};
use crate::EffectiveError;

/// Decay margin added on both sides of the solitons' support.
const MARGIN: f64 = 40.0;
/// Central-difference step for interaction gradients.
const FD_STEP: f64 = 1e-6;

/// `<H_p′(η₂), η₁>` and its gradient in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionValue {
    pub value: f64,
    pub gradient: [f64; 8],
}

/// `<H_p′(η_c), η_l> = -Re ∫ |η_c|² η_c conj(η_l)`.
fn pair_integral(c: &SolitonParams, l: &SolitonParams) -> Result<f64, EffectiveError> {
    let mu_min = c.mu.min(l.mu);
    let lo = c.a.min(l.a) - MARGIN / mu_min;
    let hi = c.a.max(l.a) + MARGIN / mu_min;
    let amp = c.mu.powi(3) * l.mu;
    let f = |x: f64| {
        let phase = (c.theta + c.v * (x - c.a) / c.mu) - (l.theta + l.v * (x - l.a) / l.mu);
        amp * sech(c.mu * (x - c.a)).powi(3) * sech(l.mu * (x - l.a)) * phase.cos()
    };
    Ok(-integrate_real(f, lo, hi, &QuadOptions::default())?)
}

fn check_separation(z: &ZCoords) -> Result<(), EffectiveError> {
    if z.separation() < 2.0 {
        return Err(EffectiveError::TooClose(z.separation()));
    }
    Ok(())
}

/// `<H_p′(η₂), η₁>` by adaptive quadrature.
pub fn interaction_integral(z: &ZCoords) -> Result<f64, EffectiveError> {
    check_separation(z)?;
    pair_integral(&z.soliton(2), &z.soliton(1))
}

fn gradient_of(
    f: impl Fn(&ZCoords) -> Result<f64, EffectiveError>,
    z: &ZCoords,
    coords: &[usize],
) -> Result<[f64; 8], EffectiveError> {
    let base = z.to_array();
    let mut g = [0.0; 8];
    for &k in coords {
        let (mut p, mut m) = (base, base);
        p[k] += FD_STEP;
        m[k] -= FD_STEP;
        g[k] = (f(&ZCoords::from_array(p))? - f(&ZCoords::from_array(m))?) / (2.0 * FD_STEP);
    }
    Ok(g)
}

/// Value and full central-difference gradient of `<H_p′(η₂), η₁>`.
pub fn interaction_gradient(z: &ZCoords) -> Result<InteractionValue, EffectiveError> {
    let value = interaction_integral(z)?;
    let all: Vec<usize> = (0..8).collect();
    let gradient = gradient_of(interaction_integral, z, &all)?;
    Ok(InteractionValue { value, gradient })
}

/// The eight modulation equations driven by the tail interactions.
pub fn rhs_general(z: &ZCoords) -> Result<[f64; 8], EffectiveError> {
    rhs_general_with(z, true)
}

/// `include_interaction = false` leaves the two decoupled free flows.
pub fn rhs_general_with(z: &ZCoords, include_interaction: bool) -> Result<[f64; 8], EffectiveError> {
    let mut out = [0.0; 8];
    let mut grads = [[0.0; 8]; 2];
    if include_interaction {
        check_separation(z)?;
        // <H_p′(η₁), η₂> drives soliton 1, <H_p′(η₂), η₁> soliton 2.
        grads[0] = gradient_of(|z| pair_integral(&z.soliton(1), &z.soliton(2)), z, &LEFT)?;
        grads[1] = gradient_of(|z| pair_integral(&z.soliton(2), &z.soliton(1)), z, &RIGHT)?;
    }
    for (j, idx) in [(1, LEFT), (2, RIGHT)] {
        let p = z.soliton(j);
        let g = &grads[j - 1];
        let [im, ia, it, iv] = idx;
        let (dh_mu, dh_v) = p.energy_partials();
        out[im] = g[it];
        out[ia] = dh_v + g[iv];
        out[it] = -dh_mu - g[im];
        out[iv] = -g[ia];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quadrature,
    Asymptotic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Quadrature => "quadrature",
            Mode::Asymptotic => "asymptotic",
        })
    }
}

fn fourier(xi: f64, a: f64, g: impl Fn(f64) -> f64) -> Result<C64, EffectiveError> {
    integrate(|x| C64::from_polar(g(x), -x * xi), -a - MARGIN, a + MARGIN, &QuadOptions::default())
}

/// `α(ξ, a) = ∫ e^{-ixξ} φ³(x-a) φ(x+a) dx`.
pub fn alpha(xi: f64, a: f64, mode: Mode) -> Result<C64, EffectiveError> {
    match mode {
        Mode::Quadrature => fourier(xi, a, |x| sech(x - a).powi(3) * sech(x + a)),
        Mode::Asymptotic => {
            let c2 = -std::f64::consts::PI.powi(2) / 6.0 + 2.0 * a - 2.0 * a * a;
            Ok((-2.0 * a).exp() * C64::new(4.0 + c2 * xi * xi, (2.0 - 4.0 * a) * xi))
        }
    }
}

/// `β(ξ, a) = ∫ e^{-ixξ} [φ³]′(x-a) φ(x+a) dx`.
pub fn beta(xi: f64, a: f64, mode: Mode) -> Result<C64, EffectiveError> {
    match mode {
        Mode::Quadrature => fourier(xi, a, |x| {
            let y = x - a;
            -3.0 * sech(y).powi(3) * y.tanh() * sech(x + a)
        }),
        Mode::Asymptotic => Ok((-2.0 * a).exp() * C64::new(4.0, (6.0 - 4.0 * a) * xi)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rhs_reduced, rhs_theorem, EffectiveState};
    use nls_soliton::{embed_symmetric, free_flow, two_soliton, Phase};
    use nls_spectral::{inner, Grid};

    #[test]
    fn integral_matches_grid_inner_product() {
        let g = Grid::new(8192, 160.0).unwrap();
        for z in [
            embed_symmetric(1.0, 5.0, 0.0, 0.0, Phase::In),
            ZCoords::from_array([1.1, -4.0, 0.9, 5.5, 0.4, 0.2, -0.3, -0.1]),
        ] {
            let q = interaction_integral(&z).unwrap();
            let eta2 = two_soliton(&ZCoords { mu1: 1.0, a1: 1e4, ..z }, g);
            let eta1 = nls_soliton::eval_soliton(&z.soliton(1), g);
            let hp = eta2.map(|c| -c * c.norm_sqr());
            let grid_val = inner(&hp, &eta1);
            assert!((q - grid_val).abs() < 1e-10 * q.abs(), "{q:e} vs {grid_val:e}");
        }
        let v = interaction_integral(&embed_symmetric(1.0, 5.0, 0.0, 0.0, Phase::In)).unwrap();
        assert!((v / (-4.0 * (-10.0f64).exp()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn scaling_and_sign_flip() {
        let v = |a: f64, s: Phase| interaction_integral(&embed_symmetric(1.0, a, 0.0, 0.0, s)).unwrap();
        let r = v(7.0, Phase::In) / v(6.0, Phase::In);
        assert!((r / (-2.0f64).exp() - 1.0).abs() < 0.05);
        assert!((v(5.0, Phase::In) + v(5.0, Phase::Opposite)).abs() < 1e-15 * v(5.0, Phase::In).abs());
        assert!(matches!(
            interaction_integral(&embed_symmetric(1.0, 0.5, 0.0, 0.0, Phase::In)),
            Err(EffectiveError::TooClose(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        for sigma in Phase::both() {
            let a: f64 = 6.0;
            let e = (-2.0 * a).exp();
            let g = interaction_gradient(&embed_symmetric(1.0, a, 0.0, 0.0, sigma)).unwrap().gradient;
            // μ̇ = ∂_θ₂ I vanishes at v = 0.
            assert!(g[6].abs() < 1e-12, "{}", g[6]);
            // v̇₂ = -∂_a₂ I = -4(-1)^σ e^{-2a}.
            assert!((g[3] / (4.0 * sigma.sign() * e) - 1.0).abs() < 0.02 / a);
            // θ coupling: -∂_μ₂ I = 6(-1)^σ e^{-2a}.
            assert!((-g[2] / (6.0 * sigma.sign() * e) - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let z = embed_symmetric(1.0, 5.0, 0.0, 0.0, Phase::In);
        let all: Vec<usize> = (0..8).collect();
        assert_eq!(gradient_of(|_| Ok(3.0), &z, &all).unwrap(), [0.0; 8]);
    }

    #[test]
    fn general_collapses_at_symmetric_states() {
        for sigma in Phase::both() {
            let z = embed_symmetric(1.003, 5.0, 0.4, 0.004, sigma);
            let r = rhs_general(&z).unwrap();
            assert!((r[0] - r[2]).abs() < 1e-10);
            assert!((r[1] + r[3]).abs() < 1e-10);
            assert!((r[4] - r[6]).abs() < 1e-10);
            assert!((r[5] + r[7]).abs() < 1e-10);
        }
        let r = rhs_general(&embed_symmetric(1.0, 5.0, 0.0, 0.0, Phase::Opposite)).unwrap();
        assert!((r[7] / (4.0 * (-10.0f64).exp()) - 1.0).abs() < 0.03);
    }

    #[test]
    fn general_matches_reduced_system() {
        for sigma in Phase::both() {
            for a in [5.0, 6.0, 7.0] {
                let h = (-a as f64).exp();
                for v in [-2.0 * h, 0.0, h, 2.0 * h] {
                    let s = EffectiveState::new(1.0, a, 0.0, v, sigma);
                    let g = rhs_general(&s.embed()).unwrap();
                    let red = rhs_reduced(&s);
                    let th = rhs_theorem(&s);
                    let tol = 50.0 * (-4.0 * a).exp() * a * a;
                    let gen = [g[2], g[3], g[6], g[7]];
                    for k in [0, 1, 3] {
                        let reference = if k == 1 { red[k] } else { th[k] };
                        assert!((gen[k] - reference).abs() <= tol, "σ={sigma} a={a} v={v:e} k={k}: {:e}", gen[k] - reference);
                    }
                    // θ̇ carries an unmodelled -(-1)^σ κ a² v² e^{-2a} with κ ≈ 13, which at
                    // |v| = 2h is 52 a² e^{-4a}.
                    let d = gen[2] - th[2];
                    if v == 0.0 {
                        assert!(d.abs() <= 1e-3 * tol, "σ={sigma} a={a}: {d:e}");
                    } else {
                        let kappa = -d / (sigma.sign() * a * a * v * v * (-2.0 * a).exp());
                        assert!((12.5..13.5).contains(&kappa), "σ={sigma} a={a} v={v:e}: κ = {kappa}");
                    }
                }
            }
        }
    }

    #[test]
    fn decoupled_limit_is_free_flow() {
        let z = ZCoords::from_array([1.1, -4.0, 0.9, 5.5, 0.4, 0.2, -0.3, -0.1]);
        let r = rhs_general_with(&z, false).unwrap();
        for (j, idx) in [(1, LEFT), (2, RIGHT)] {
            let p = z.soliton(j);
            let h = 1e-6;
            let (fp, fm) = (free_flow(&p, h).to_array(), free_flow(&p, -h).to_array());
            for k in 0..4 {
                assert!((r[idx[k]] - (fp[k] - fm[k]) / (2.0 * h)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn alpha_beta_examples() {
        let a5 = alpha(0.0, 5.0, Mode::Asymptotic).unwrap();
        assert!((a5.re - 1.81599e-4).abs() < 1e-9);
        let q = alpha(0.0, 5.0, Mode::Quadrature).unwrap();
        assert!(((q - a5).norm() / a5.norm()) <= 10.0 * (-10.0f64).exp());
        for a in [4.0f64, 5.0, 6.0, 7.0] {
            let e = (-2.0 * a).exp();
            let b = beta(0.0, a, Mode::Quadrature).unwrap();
            assert!((b.re / (4.0 * e) - 1.0).abs() <= 10.0 * e);
        }
    }
}
