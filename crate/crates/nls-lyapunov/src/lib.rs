//! Localized Weinstein functional around a two-soliton state and the
//! diagnostics built on it.
//!
//! Conventions: `M = ½∫|u|²`, `P = ½ Im∫ ū u_x`, `H = ¼∫|u_x|² - ¼∫|u|⁴`, so
//! `M′(u) = u`, `P′(u) = -iu_x` and `H′(u) = -½u_xx - |u|²u` for the real
//! inner product `<u, v> = Re∫u v̄`.

mod cutoff;
mod monitor;

use nls_soliton::{SolitonParams, ZCoords};
use nls_spectral::{hamiltonian, inner, mass, momentum, Field, C64, I};

pub use cutoff::{make_cutoffs, sine_step, CutoffPair};
pub use monitor::{count_violations, fit_constant, monitor, summarize, MonitorInput, MonitorReport, MonitorRow};

fn check(u: &Field, cut: &CutoffPair) {
    assert!(u.grid().same_as(&cut.grid()), "field and cutoffs live on different grids");
}

fn weighted(psi: &Field, f: impl Fn(usize) -> f64) -> f64 {
    psi.values().iter().enumerate().map(|(j, p)| p.re * f(j)).sum::<f64>() * psi.grid().dx()
}

/// `(M₁, M₂, P₁, P₂)` with `M_j = M(ψ_j^{1/2}u)` and `P_j = P(ψ_j^{1/2}u) = ½ Im∫ψ_j ū u_x`.
pub fn localized_functionals(u: &Field, cut: &CutoffPair) -> (f64, f64, f64, f64) {
    check(u, cut);
    let ux = u.derivative();
    let (v, vx) = (u.values(), ux.values());
    let m = |psi: &Field| 0.5 * weighted(psi, |j| v[j].norm_sqr());
    let p = |psi: &Field| 0.5 * weighted(psi, |j| (v[j].conj() * vx[j]).im);
    (m(&cut.psi1), m(&cut.psi2), p(&cut.psi1), p(&cut.psi2))
}

/// `c_j = -∂_μH(η_j) = ½(μ_j² + μ_j⁻²v_j²)`, the coefficients of `M_j` in `W`.
pub fn mass_coefficients(z: &ZCoords) -> [f64; 2] {
    [1, 2].map(|j| -z.soliton(j).energy_partials().0)
}

/// `d_j = ∂_vH(η_j) = v_j/μ_j`, the coefficients of `-P_j` in `W`.
pub fn momentum_coefficients(z: &ZCoords) -> [f64; 2] {
    [1, 2].map(|j| z.soliton(j).energy_partials().1)
}

/// `W_z(u) = Σ c_j M_j(u) - Σ d_j P_j(u) + H(u)`.
#[allow(non_snake_case)]
pub fn W(z: &ZCoords, u: &Field, cut: &CutoffPair) -> f64 {
    let (m1, m2, p1, p2) = localized_functionals(u, cut);
    let [c1, c2] = mass_coefficients(z);
    let [d1, d2] = momentum_coefficients(z);
    c1 * m1 + c2 * m2 - d1 * p1 - d2 * p2 + hamiltonian(u)
}

/// `H′(u) = -½u_xx - |u|²u`.
pub fn h_prime(u: &Field) -> Field {
    let uxx = u.second_derivative();
    u.zip_with(&uxx, |a, b| -0.5 * b - a.norm_sqr() * a)
}

/// `H″(u)w = -½w_xx - 2|u|²w - u² w̄`.
pub fn h_second(u: &Field, w: &Field) -> Field {
    let wxx = w.second_derivative();
    Field::from_values(
        w.grid(),
        (0..w.grid().n())
            .map(|j| {
                let (a, b) = (u.values()[j], w.values()[j]);
                -0.5 * wxx.values()[j] - 2.0 * a.norm_sqr() * b - a * a * b.conj()
            })
            .collect(),
    )
}

/// `P_j″ w = -(i/2)ψ_j′w - iψ_j w_x`; also `P_j′(u)` with `w = u`.
fn p_local(psi: &Field, dpsi: &Field, w: &Field) -> Field {
    let wx = w.derivative();
    Field::from_values(
        w.grid(),
        (0..w.grid().n())
            .map(|j| -I * (0.5 * dpsi.values()[j].re * w.values()[j] + psi.values()[j].re * wx.values()[j]))
            .collect(),
    )
}

/// `W_z′(u) = Σ c_j ψ_j u - Σ d_j P_j′(u) + H′(u)`.
pub fn w_prime(z: &ZCoords, u: &Field, cut: &CutoffPair) -> Field {
    check(u, cut);
    local_part(z, u, cut) + h_prime(u)
}

/// The linear pieces `Σ c_j ψ_j w - Σ d_j P_j″w`, shared by `W′` and `W″`.
fn local_part(z: &ZCoords, w: &Field, cut: &CutoffPair) -> Field {
    let [c1, c2] = mass_coefficients(z);
    let [d1, d2] = momentum_coefficients(z);
    let dpsi1 = cut.dpsi2.scale_real(-1.0);
    let mut out = w.zip_with(&cut.psi1, |a, p| a * (c1 * p.re)) + w.zip_with(&cut.psi2, |a, p| a * (c2 * p.re));
    out.axpy(C64::new(-d1, 0.0), &p_local(&cut.psi1, &dpsi1, w));
    out.axpy(C64::new(-d2, 0.0), &p_local(&cut.psi2, &cut.dpsi2, w));
    out
}

/// `W_z″(base)w`.
pub fn w_second(z: &ZCoords, base: &Field, w: &Field, cut: &CutoffPair) -> Field {
    check(w, cut);
    local_part(z, w, cut) + h_second(base, w)
}

/// `<W_z″(base)w, w>`. The Lyapunov argument uses `base = u_z`.
pub fn quadratic_form(z: &ZCoords, base: &Field, w: &Field, cut: &CutoffPair) -> f64 {
    inner(&w_second(z, base, w, cut), w)
}

/// `L_z(u) = W_z(u) - W_z(ũ) - <W_z′(ũ), u - ũ>` with `ũ = u_z + ν`.
#[allow(non_snake_case)]
pub fn L(z: &ZCoords, u: &Field, cut: &CutoffPair, u_tilde: &Field) -> f64 {
    let w = u - u_tilde;
    W(z, u, cut) - W(z, u_tilde, cut) - inner(&w_prime(z, u_tilde, cut), &w)
}

/// `({H,M₁}, {H,M₂}, {H,P₁}, {H,P₂})`, the rates of the localized functionals
/// along the flow:
/// `{H,M_j} = ½ Im∫ψ_j′ ū u_x`,
/// `{H,P_j} = ∫ψ_j′(½|u_x|² - ¼|u|⁴) - ⅛∫ψ_j‴|u|²`.
/// `ψ_j″` jumps at the edge of the transition layer and a nodal sum over it
/// only converges at first order, so the last integral is moved onto `|u|²`
/// as `-⅛∫ψ_j′ (|u|²)_xx`.
pub fn poisson_brackets(u: &Field, cut: &CutoffPair) -> (f64, f64, f64, f64) {
    check(u, cut);
    let ux = u.derivative();
    let uxx = u.second_derivative();
    let (v, vx, vxx) = (u.values(), ux.values(), uxx.values());
    let hm2 = 0.5 * weighted(&cut.dpsi2, |j| (v[j].conj() * vx[j]).im);
    // (|u|²)_xx = 2 Re(ū u_xx) + 2|u_x|².
    let density = |j: usize| {
        0.5 * vx[j].norm_sqr() - 0.25 * v[j].norm_sqr().powi(2)
            - 0.25 * ((v[j].conj() * vxx[j]).re + vx[j].norm_sqr())
    };
    let hp2 = weighted(&cut.dpsi2, density);
    (-hm2, hm2, -hp2, hp2)
}

/// Single-soliton functional `-∂_μH(η)M(u) - ∂_vH(η)P(u) + H(u)`.
pub fn classical_w(p: &SolitonParams, u: &Field) -> f64 {
    let (hm, hv) = p.energy_partials();
    -hm * mass(u) - hv * momentum(u) + hamiltonian(u)
}

/// Its gradient `-∂_μH u + i∂_vH u_x + H′(u)`, which vanishes at `u = η_p`.
pub fn classical_w_prime(p: &SolitonParams, u: &Field) -> Field {
    let (hm, hv) = p.energy_partials();
    let mut out = h_prime(u);
    out.axpy(C64::new(-hm, 0.0), u);
    out.axpy(I * hv, &u.derivative());
    out
}

/// `<R″w, w>` for the single-soliton functional at `η_p`.
pub fn classical_quadratic_form(p: &SolitonParams, eta: &Field, w: &Field) -> f64 {
    let (hm, hv) = p.energy_partials();
    let mut r = h_second(eta, w);
    r.axpy(C64::new(-hm, 0.0), w);
    r.axpy(I * hv, &w.derivative());
    inner(&r, w)
}
