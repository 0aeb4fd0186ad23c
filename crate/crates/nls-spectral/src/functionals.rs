use crate::Field;

fn check(u: &Field, v: &Field) {
    assert!(u.grid().same_as(&v.grid()), "fields live on different grids");
}

/// Spectral `∂_x`.
pub fn derivative(u: &Field) -> Field {
    u.derivative()
}

/// `<u, v> = Re ∫ u conj(v)`.
pub fn inner(u: &Field, v: &Field) -> f64 {
    check(u, v);
    let s: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a.re * b.re + a.im * b.im).sum();
    s * u.grid().dx()
}

/// `ω(v1, v2) = <v1, J⁻¹ v2>` with `J = -i`, which equals `Im ∫ v1 conj(v2)`.
pub fn symplectic_pair(v1: &Field, v2: &Field) -> f64 {
    check(v1, v2);
    let s: f64 = v1.values().iter().zip(v2.values()).map(|(a, b)| a.im * b.re - a.re * b.im).sum();
    s * v1.grid().dx()
}

fn norm_sq(u: &Field) -> f64 {
    u.values().iter().map(|c| c.norm_sqr()).sum::<f64>() * u.grid().dx()
}

/// `∫|u_x|²` through Parseval, without an inverse transform.
fn derivative_norm_sq(u: &Field) -> f64 {
    let g = u.grid();
    let s: f64 = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let k = g.wavenumber(m);
            k * k * c.norm_sqr()
        })
        .sum();
    s * g.dx() / g.n() as f64
}

pub fn l2_norm(u: &Field) -> f64 {
    norm_sq(u).sqrt()
}

/// `(∫|u|² + ∫|u_x|²)^{1/2}`.
pub fn h1_norm(u: &Field) -> f64 {
    (norm_sq(u) + derivative_norm_sq(u)).sqrt()
}

/// `½ ∫|u|²`.
pub fn mass(u: &Field) -> f64 {
    0.5 * norm_sq(u)
}

/// `½ Im ∫ conj(u) u_x`.
pub fn momentum(u: &Field) -> f64 {
    let ux = u.derivative();
    let s: f64 = u.values().iter().zip(ux.values()).map(|(a, b)| (a.conj() * b).im).sum();
    0.5 * s * u.grid().dx()
}

/// `¼ ∫|u_x|² - ¼ ∫|u|⁴`.
pub fn hamiltonian(u: &Field) -> f64 {
    let quartic: f64 = u.values().iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>() * u.grid().dx();
    0.25 * derivative_norm_sq(u) - 0.25 * quartic
}
