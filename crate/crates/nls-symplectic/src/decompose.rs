use nalgebra::{SMatrix, SVector};
use nls_soliton::{two_soliton, ZCoords};
use nls_spectral::{h1_norm, symplectic_pair, Field};

use crate::{Frame, SymplecticError};

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    /// Stop when every orthogonality residual is below `tol · ‖u‖_{H¹}`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Central-difference step for the Jacobian, scaled by `max(1, |z^ℓ|)`.
    pub fd_step: f64,
    /// Smallest admissible `|a₂ - a₁|`.
    pub min_separation: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iterations: 50, fd_step: 1e-6, min_separation: 2.0 }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub z: ZCoords,
    pub w: Field,
    /// `<w, J⁻¹∂_ℓ u_z>` at the returned `z`.
    pub residuals: [f64; 8],
    pub iterations: usize,
    /// Max residual before each Newton update and at the end.
    pub history: Vec<f64>,
}

impl Decomposition {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `G_ℓ(z) = <u - u_z, J⁻¹∂_ℓ u_z>`.
fn orthogonality(u: &Field, z: &ZCoords) -> (SVector<f64, 8>, Field) {
    let w = u - two_soliton(z, u.grid());
    let frame = Frame::two_soliton(z, u.grid());
    let g = SVector::<f64, 8>::from_iterator(frame.fields.iter().map(|d| symplectic_pair(&w, d)));
    (g, w)
}

fn guard(z: &ZCoords, min_sep: f64) -> Result<(), SymplecticError> {
    if !z.is_valid() {
        return Err(SymplecticError::LeftManifold(format!("invalid amplitudes or non-finite z: {z:?}")));
    }
    if z.separation() < min_sep {
        return Err(SymplecticError::LeftManifold(format!("solitons overlap: |a2 - a1| = {}", z.separation())));
    }
    Ok(())
}

/// Newton solve of the eight symplectic orthogonality conditions for `z`,
/// starting from `z_guess`.
pub fn decompose(u: &Field, z_guess: &ZCoords, opts: &DecomposeOptions) -> Result<Decomposition, SymplecticError> {
    let target = opts.tol * h1_norm(u);
    let mut z = *z_guess;
    guard(&z, opts.min_separation)?;
    let mut history = Vec::new();
    for it in 0..=opts.max_iterations {
        let (g, w) = orthogonality(u, &z);
        let res = g.amax();
        history.push(res);
        if !res.is_finite() {
            return Err(SymplecticError::LeftManifold("non-finite residual".into()));
        }
        if res <= target {
            let mut residuals = [0.0; 8];
            residuals.copy_from_slice(g.as_slice());
            return Ok(Decomposition { z, w, residuals, iterations: it, history });
        }
        if it == opts.max_iterations {
            break;
        }
        let base = z.to_array();
        let mut jac = SMatrix::<f64, 8, 8>::zeros();
        for m in 0..8 {
            let h = opts.fd_step * base[m].abs().max(1.0);
            let (mut zp, mut zm) = (base, base);
            zp[m] += h;
            zm[m] -= h;
            let (gp, _) = orthogonality(u, &ZCoords::from_array(zp));
            let (gm, _) = orthogonality(u, &ZCoords::from_array(zm));
            jac.set_column(m, &((gp - gm) / (2.0 * h)));
        }
        let step = jac
            .lu()
            .solve(&(-g))
            .ok_or_else(|| SymplecticError::LeftManifold("singular Newton Jacobian".into()))?;
        let mut next = base;
        for m in 0..8 {
            next[m] += step[m];
        }
        z = ZCoords::from_array(next);
        guard(&z, opts.min_separation)?;
    }
    Err(SymplecticError::NoConvergence {
        iterations: opts.max_iterations,
        residual: *history.last().unwrap_or(&f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{complement, pairing_matrix};
    use nls_soliton::{embed_symmetric, Phase};
    use nls_spectral::{Grid, C64};

    fn grid() -> Grid {
        Grid::new(2048, 100.0).unwrap()
    }

    fn zstar() -> ZCoords {
        ZCoords::from_array([1.02, -5.1, 0.97, 4.9, 3.3, -0.03, 0.1, 0.02])
    }

    #[test]
    fn fixed_point() {
        let u = two_soliton(&zstar(), grid());
        let d = decompose(&u, &zstar(), &DecomposeOptions::default()).unwrap();
        assert_eq!(d.iterations, 0);
        assert_eq!(d.z, zstar());
        assert!(h1_norm(&d.w) < 1e-14);
    }

    #[test]
    fn recovers_from_perturbed_guess_with_quadratic_convergence() {
        let u = two_soliton(&zstar(), grid());
        let guess = ZCoords::from_array(zstar().to_array().map(|c| c + 1e-2));
        let d = decompose(&u, &guess, &DecomposeOptions::default()).unwrap();
        for (a, b) in d.z.to_array().iter().zip(zstar().to_array()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(d.max_residual() <= 1e-11 * h1_norm(&u));
        assert!(h1_norm(&(two_soliton(&d.z, grid()) + &d.w - &u)) < 1e-13);
        // Quadratic convergence once below 1e-4 (until the round-off floor).
        let h = &d.history;
        for k in 1..h.len() {
            if h[k - 1] < 1e-4 && h[k] > 1e-12 {
                assert!(h[k] <= 10.0 * h[k - 1] * h[k - 1], "{h:?}");
            }
        }
    }

    #[test]
    fn orthogonal_perturbation_is_recovered_as_w() {
        let g = grid();
        let z = zstar();
        let frame = Frame::two_soliton(&z, g);
        let a = pairing_matrix(&frame).unwrap();
        let bump = Field::from_fn(g, |x| C64::new(1.0, 0.5) * (-(x - 4.0) * (x - 4.0)).exp() * (1.0 + x / 5.0));
        let p = complement(&frame, &a, &bump);
        let p = p.scale_real(1e-3 / h1_norm(&p));
        let u = two_soliton(&z, g) + &p;
        let d = decompose(&u, &z, &DecomposeOptions::default()).unwrap();
        for (a, b) in d.z.to_array().iter().zip(z.to_array()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((h1_norm(&d.w) - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn refuses_overlap() {
        let z = embed_symmetric(1.0, 0.8, 0.0, 0.0, Phase::In);
        let u = two_soliton(&z, grid());
        assert!(matches!(
            decompose(&u, &z, &DecomposeOptions::default()),
            Err(SymplecticError::LeftManifold(_))
        ));
    }
}
