use nls_correction::{
    build_correction, build_correction_with, build_rho, build_rho_with, build_source_rate, orthogonality_defects,
    reference_grid, residual, residual_with, symmetric_velocity, CorrectionOptions, ResidualOptions, SourceSign,
};
use nls_soliton::{embed_symmetric, group_apply, Phase};
use nls_spectral::{h1_norm, l2_norm, symplectic_pair, Field, Grid};
use nls_symplectic::Frame;

fn sim_grid() -> Grid {
    Grid::new(2048, 80.0).unwrap()
}

fn fit_slope(hs: &[f64], rs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = hs.iter().zip(rs).map(|(h, r)| (h.ln(), r.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn rho_scales() {
    for sigma in Phase::both() {
        for a in [5.0f64, 6.0, 7.0] {
            let h = (-a).exp();
            let z = embed_symmetric(1.0, a, 0.0, h, sigma);
            for j in [1, 2] {
                let r = build_rho(&z, j).unwrap();
                let c1 = h1_norm(&r.rho1.field) / (h * h);
                let c2 = h1_norm(&r.rho2.field) / (h.powi(3) * (1.0 + a));
                assert!((0.1..100.0).contains(&c1), "σ={sigma} a={a} j={j}: ρ¹ {c1}");
                assert!((0.1..100.0).contains(&c2), "σ={sigma} a={a} j={j}: ρ² {c2}");
            }
        }
    }
}

#[test]
fn source_rate_at_rest_is_small() {
    let g = reference_grid();
    for a in [5.0f64, 6.0, 7.0] {
        let h = (-a).exp();
        let z = embed_symmetric(1.0, a, 0.0, 0.0, Phase::In);
        let ft = build_source_rate(&z, &symmetric_velocity(&z).unwrap(), 2, g);
        assert!(l2_norm(&ft) < h.powi(3), "a={a}");
    }
}

#[test]
fn parity() {
    let g = sim_grid();
    for sigma in Phase::both() {
        for v in [0.0, 0.004] {
            let z = embed_symmetric(1.0, 5.0, 0.3, v, sigma);
            let nu = build_correction(&z, g).unwrap();
            let n = g.n();
            let s = match sigma {
                Phase::In => 1.0,
                Phase::Opposite => -1.0,
            };
            // Node j mirrors node n - j; the rotation e^{iθ} is common to both halves.
            let worst = (1..n).map(|j| (nu.values()[j] - s * nu.values()[n - j]).norm()).fold(0.0, f64::max);
            assert!(worst < 1e-10, "σ={sigma} v={v}: {worst:e}");
        }
    }
}

#[test]
fn size_law() {
    let g = sim_grid();
    let size = |a: f64| h1_norm(&build_correction(&embed_symmetric(1.0, a, 0.0, 0.0, Phase::Opposite), g).unwrap());
    let r = size(6.0) / size(5.0);
    let e2 = (-2.0f64).exp();
    assert!(r > 0.5 * e2 && r < 2.0 * e2, "{r}");
}

#[test]
fn symplectic_orthogonality_by_soliton() {
    let g = sim_grid();
    for sigma in Phase::both() {
        for v in [0.0, (-5.0f64).exp()] {
            let z = embed_symmetric(1.0, 5.0, 0.0, v, sigma);
            let c = build_correction_with(&z, &symmetric_velocity(&z).unwrap(), g, &CorrectionOptions::default()).unwrap();
            for j in [1, 2] {
                let p = z.soliton(j);
                let nu_j = group_apply(&p, &(&c.rho[j - 1].rho1.field + &c.rho[j - 1].rho2.field), g).unwrap();
                let frame = Frame::single(&p, g);
                let d: Vec<f64> = frame
                    .fields
                    .iter()
                    .map(|f| symplectic_pair(&nu_j, f).abs() / (l2_norm(&nu_j) * l2_norm(f)))
                    .collect();
                // ρ is ω-orthogonal to the a and θ directions only; the μ and v pairings are O(1).
                assert!(d[1] <= 1e-2 && d[2] <= 1e-2, "σ={sigma} v={v} j={j}: {d:?}");
                assert!(d[3] > 0.05, "σ={sigma} v={v} j={j}: {d:?}");
            }
            let whole = orthogonality_defects(&c.nu, &z);
            assert!(whole.iter().all(|x| x.is_finite()));
        }
    }
}

#[test]
fn gauge_invariance() {
    let g = sim_grid();
    for sigma in Phase::both() {
        let z = embed_symmetric(1.0, 5.0, 0.0, 0.002, sigma);
        let zd = symmetric_velocity(&z).unwrap();
        let base = residual(&z, &zd, g).unwrap();
        let mut shifted = z;
        shifted.theta1 += 0.7;
        shifted.theta2 += 0.7;
        let r = residual(&shifted, &zd, g).unwrap();
        assert!((r.residual - base.residual).abs() < 1e-10);
        assert!((r.nu_h1 - base.nu_h1).abs() < 1e-10);
    }
}

#[test]
fn residual_scaling() {
    let g = sim_grid();
    let off = ResidualOptions { include_correction: false, ..Default::default() };
    let printed = ResidualOptions {
        correction: CorrectionOptions { sign: SourceSign::Printed, ..Default::default() },
        ..Default::default()
    };
    for sigma in Phase::both() {
        let (mut hs, mut on_r, mut off_r) = (vec![], vec![], vec![]);
        for a in [5.0f64, 6.0, 7.0] {
            let z = embed_symmetric(1.0, a, 0.0, 0.0, sigma);
            let zd = symmetric_velocity(&z).unwrap();
            let on = residual(&z, &zd, g).unwrap();
            let bare = residual_with(&z, &zd, g, &off).unwrap();
            let wrong = residual_with(&z, &zd, g, &printed).unwrap();
            // The opposite sign doubles the uncorrected residual instead of cancelling it.
            assert!((wrong.residual / bare.residual - 2.0).abs() < 0.05, "a={a}");
            hs.push((-a).exp());
            on_r.push(on.residual);
            off_r.push(bare.residual);
        }
        let (s_on, s_off) = (fit_slope(&hs, &on_r), fit_slope(&hs, &off_r));
        assert!(s_on >= 3.5, "σ={sigma}: slope {s_on}");
        assert!((s_off - 2.0).abs() < 0.1, "σ={sigma}: slope {s_off}");
    }
}

#[test]
fn rho_with_explicit_velocity() {
    let z = embed_symmetric(1.0, 5.0, 0.0, 0.0, Phase::In);
    let still = [0.0; 8];
    let r = build_rho_with(&z, 2, &still, &CorrectionOptions::default()).unwrap();
    assert_eq!(r.rho2.field.max_abs(), 0.0);
    let c = build_correction_with(&z, &still, sim_grid(), &CorrectionOptions::default()).unwrap();
    let first = Field::zeros(sim_grid());
    assert!(h1_norm(&(c.nu - &first)) > 0.0);
}
