//! Pointwise closed forms for `η` and its derivatives.

use nls_spectral::{C64, I};

use crate::SolitonParams;

pub fn sech(x: f64) -> f64 {
    // cosh overflows past |x| ≈ 710; the limit is exact zero in double precision.
    if x.abs() > 700.0 {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

/// `φ′ = -sech·tanh`.
pub fn sech_prime(x: f64) -> f64 {
    -sech(x) * x.tanh()
}

/// `φ″ = φ - 2φ³`.
pub fn sech_second(x: f64) -> f64 {
    let s = sech(x);
    s - 2.0 * s * s * s
}

/// Carrier `e^{iΘ}` with `Θ = θ + v(x-a)/μ`, and `ξ = μ(x-a)`.
#[inline]
fn frame(p: &SolitonParams, x: f64) -> (C64, f64) {
    let y = x - p.a;
    (C64::from_polar(1.0, p.theta + p.v * y / p.mu), p.mu * y)
}

pub fn eta(p: &SolitonParams, x: f64) -> C64 {
    let (e, xi) = frame(p, x);
    e * (p.mu * sech(xi))
}

pub fn eta_x(p: &SolitonParams, x: f64) -> C64 {
    let (e, xi) = frame(p, x);
    e * (I * (p.v * sech(xi)) + p.mu * p.mu * sech_prime(xi))
}

pub fn eta_xx(p: &SolitonParams, x: f64) -> C64 {
    let (e, xi) = frame(p, x);
    let m = p.mu;
    e * (C64::new(-p.v * p.v / m * sech(xi), 0.0)
        + I * (2.0 * p.v * m * sech_prime(xi))
        + m * m * m * sech_second(xi))
}

/// `(∂_μη, ∂_aη, ∂_θη, ∂_vη)` at `x`.
pub fn eta_partials(p: &SolitonParams, x: f64) -> [C64; 4] {
    let (e, xi) = frame(p, x);
    let y = x - p.a;
    let (f, fp) = (sech(xi), sech_prime(xi));
    let d_mu = e * (C64::new(f + xi * fp, 0.0) - I * (p.v * y / p.mu * f));
    let d_a = e * (C64::new(-p.mu * p.mu * fp, 0.0) - I * (p.v * f));
    let d_theta = I * e * (p.mu * f);
    let d_v = e * I * (y * f);
    [d_mu, d_a, d_theta, d_v]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partials_match_finite_differences() {
        let p = SolitonParams::new(1.3, 0.4, 0.7, -0.5);
        let h = 1e-5;
        for &x in &[-2.0, -0.3, 0.0, 0.9, 3.1] {
            let d = eta_partials(&p, x);
            for (k, dk) in d.iter().enumerate() {
                let mut a = p.to_array();
                let mut b = p.to_array();
                a[k] += h;
                b[k] -= h;
                let fd = (eta(&SolitonParams::from_array(a), x) - eta(&SolitonParams::from_array(b), x))
                    / (2.0 * h);
                assert!((fd - dk).norm() < 1e-9, "k={k} x={x}");
            }
            let fd = (eta(&p, x + h) - eta(&p, x - h)) / (2.0 * h);
            assert!((fd - eta_x(&p, x)).norm() < 1e-9);
            let fd2 = (eta_x(&p, x + h) - eta_x(&p, x - h)) / (2.0 * h);
            assert!((fd2 - eta_xx(&p, x)).norm() < 1e-9);
        }
    }

    #[test]
    fn far_tail_is_zero() {
        assert_eq!(sech(800.0), 0.0);
        assert!(sech(-600.0) > 0.0);
    }
}
