use nls_symplectic::*;
use nalgebra::DMatrix;
use nls_soliton::{embed_symmetric, two_soliton, Phase, SolitonParams};
use nls_spectral::{h1_norm, symplectic_pair, Field, Grid, C64, I};

fn random_field(grid: Grid, seed: u64) -> Field {
    // Cheap deterministic pseudo-random bumps.
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut r = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let bumps: Vec<(f64, f64, C64)> = (0..6).map(|_| (6.0 * r(), 0.5 + r().abs(), C64::new(r(), r()))).collect();
    Field::from_fn(grid, |x| bumps.iter().map(|(c, w, amp)| amp * (-(x - c) * (x - c) / w).exp()).sum())
}

#[test]
fn single_frame_pairing_pattern() {
    let g = Grid::new(1024, 80.0).unwrap();
    let f = Frame::single(&SolitonParams::REFERENCE, g);
    let a = pairing_matrix(&f).unwrap();
    let e = &a.entries;
    // Order (μ, a, θ, v): a_{μθ} = -1, a_{av} = -1 and their transposes.
    assert!((e[(0, 2)] + 1.0).abs() < 1e-10);
    assert!((e[(2, 0)] - 1.0).abs() < 1e-10);
    assert!((e[(3, 1)] - 1.0).abs() < 1e-10);
    for (l, m) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
        assert!(e[(l, m)].abs() < 1e-10, "({l},{m}) = {}", e[(l, m)]);
    }
    // Same pattern away from the reference point: i*ω = dθ∧dμ + dv∧da.
    let p = SolitonParams::new(1.4, 2.0, 0.3, 0.7);
    let a = pairing_matrix(&Frame::single(&p, g)).unwrap();
    assert!((a.entries[(0, 2)] + 1.0).abs() < 1e-10);
    assert!((a.entries[(3, 1)] - 1.0).abs() < 1e-10);
    assert!(a.entries[(0, 1)].abs() < 1e-10 && a.entries[(0, 3)].abs() < 1e-10);
}

#[test]
fn two_soliton_block_form() {
    let g = Grid::new(2048, 100.0).unwrap();
    let z = embed_symmetric(1.0, 8.0, 0.0, 0.0, Phase::In);
    let f = Frame::two_soliton(&z, g);
    let a = pairing_matrix(&f).unwrap();
    let mut target = DMatrix::zeros(8, 8);
    for l in 0..4 {
        target[(l, l + 4)] = -1.0;
        target[(l + 4, l)] = 1.0;
    }
    let diff = (&a.entries - target).abs().max();
    // Cross pairings carry up to (x - a)² weights, hence the a³ factor.
    assert!(diff < 10.0 * 8f64.powi(3) * (-16.0f64).exp(), "{diff}");
    assert_eq!(&a.entries + a.entries.transpose(), DMatrix::zeros(8, 8));
    // Entrywise agreement with symplectic_pair.
    for l in 0..8 {
        for m in 0..8 {
            let d = symplectic_pair(&f.fields[l], &f.fields[m]);
            assert!((a.entries[(l, m)] - d).abs() < 1e-12);
        }
    }
    assert!((&a.entries * &a.inverse - DMatrix::identity(8, 8)).abs().max() < 1e-8);
}

#[test]
fn cross_block_decay() {
    let g = Grid::new(4096, 120.0).unwrap();
    let cross = |a: f64| {
        let m = pairing_matrix(&Frame::two_soliton(&embed_symmetric(1.0, a, 0.0, 0.0, Phase::In), g)).unwrap();
        let mut c: f64 = 0.0;
        for l in nls_soliton::LEFT {
            for r in nls_soliton::RIGHT {
                c = c.max(m.entries[(l, r)].abs());
            }
        }
        c / a
    };
    let ratio = cross(8.0) / cross(6.0) / (-4.0f64).exp();
    assert!((1.0 / 3.0..3.0).contains(&ratio), "{ratio}");
}

#[test]
fn degenerate_frame_rejected() {
    let g = Grid::new(256, 40.0).unwrap();
    let f = Frame::single(&SolitonParams::REFERENCE, g);
    let mut fields = f.fields.clone();
    fields[1] = fields[0].clone();
    fields[3] = fields[2].scale(C64::new(2.0, 0.0));
    let fr = Frame::new(fields, f.labels.clone()).unwrap();
    assert!(matches!(pairing_matrix(&fr), Err(SymplecticError::Degenerate(_))));
    assert!(Frame::new(f.fields[..3].to_vec(), vec!["a", "b", "c"]).is_err());
}

#[test]
fn projection_properties() {
    let g = Grid::new(2048, 100.0).unwrap();
    let z = embed_symmetric(1.05, 6.0, 0.3, 0.02, Phase::Opposite);
    let f = Frame::two_soliton(&z, g);
    let a = pairing_matrix(&f).unwrap();
    for d in &f.fields {
        assert!(h1_norm(&(project(&f, &a, d) - d)) < 1e-9 * h1_norm(d));
    }
    for seed in 0..5 {
        let r = random_field(g, seed);
        let s = random_field(g, seed + 100);
        let p = project(&f, &a, &r);
        assert!(h1_norm(&(project(&f, &a, &p) - &p)) < 1e-9 * h1_norm(&r));
        let c = complement(&f, &a, &r);
        let scale = norm(&r);
        for d in &f.fields {
            assert!(symplectic_pair(&c, d).abs() < 1e-9 * scale * norm(d));
        }
        let (al, be) = (C64::new(0.7, 0.0), C64::new(-1.3, 0.0));
        let lin = project(&f, &a, &(r.scale(al) + s.scale(be)));
        let sep = project(&f, &a, &r).scale(al) + project(&f, &a, &s).scale(be);
        assert!(h1_norm(&(lin - sep)) < 1e-10 * h1_norm(&r).max(1.0));
    }
}

fn norm(f: &Field) -> f64 {
    nls_spectral::l2_norm(f)
}

/// `Π⊥ J H′(u_z)` is the interaction remainder, of size `h² a`.
#[test]
fn complement_of_vector_field_is_small() {
    let g = Grid::new(4096, 140.0).unwrap();
    let mut ratios = vec![];
    for a0 in [5.0, 6.0, 7.0] {
        let z = embed_symmetric(1.0, a0, 0.0, 0.0, Phase::In);
        let u = two_soliton(&z, g);
        let hp = u.second_derivative() * (-0.5) - u.map(|c| c * c.norm_sqr());
        let jh = hp * (-I);
        let f = Frame::two_soliton(&z, g);
        let a = pairing_matrix(&f).unwrap();
        let c = complement(&f, &a, &jh);
        ratios.push(h1_norm(&c) / ((-2.0 * a0).exp() * a0));
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    assert!(hi < 100.0 && lo > 0.01 && hi / lo < 3.0, "{ratios:?}");
}
