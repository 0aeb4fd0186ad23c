use nls_correction::{
    reference_frame, reference_grid, reference_source, s_apply, s_solve, weighted_h2_norm, weighted_norm,
    ReferenceOperator, DECAY_RATE,
};
use nls_soliton::profile::{eta, sech, sech_prime};
use nls_soliton::{group_adjoint, group_apply_fn, SolitonParams};
use nls_spectral::{h1_norm, inner, l2_norm, Field, Grid, C64, I};
use nls_symplectic::{pairing_matrix, project, Frame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of three complex Gaussian bumps with random centres, widths and tilts.
#[derive(Clone, Copy)]
struct Bumps([(C64, f64, f64, f64); 3]);

impl Bumps {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Bumps(std::array::from_fn(|_| {
            (
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.7..2.0),
                rng.gen_range(-0.5..0.5),
            )
        }))
    }

    fn eval(&self, x: f64) -> C64 {
        self.0
            .iter()
            .map(|(c, s, w, k)| c * C64::from_polar((-(x - s) * (x - s) / (w * w)).exp(), k * x))
            .sum()
    }

    fn field(&self, g: Grid) -> Field {
        Field::from_fn(g, |x| self.eval(x))
    }
}

fn sim_grid() -> Grid {
    Grid::new(2048, 80.0).unwrap()
}

#[test]
fn kernel_and_generalized_kernel() {
    let g = reference_grid();
    let phi = Field::from_real_fn(g, sech);
    let dphi = Field::from_real_fn(g, sech_prime);
    assert!(h1_norm(&s_apply(&phi.scale(I))) < 1e-10);
    assert!(h1_norm(&s_apply(&dphi)) < 1e-10);
    let ixphi = Field::from_fn(g, |x| I * (x * sech(x)));
    assert!(h1_norm(&(s_apply(&ixphi) + dphi.scale(I))) < 1e-10);
    let dmu = Field::from_real_fn(g, |x| sech(x) + x * sech_prime(x));
    assert!(h1_norm(&(s_apply(&dmu) + &phi)) < 1e-10);
}

#[test]
fn self_adjoint_on_random_pairs() {
    let g = reference_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = Bumps::random(&mut rng).field(g);
        let b = Bumps::random(&mut rng).field(g);
        let d = inner(&s_apply(&a), &b) - inner(&a, &s_apply(&b));
        assert!(d.abs() <= 1e-10, "{d:e}");
    }
}

#[test]
fn conjugation_identity() {
    let g = reference_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let b = Bumps::random(&mut rng);
        let gf = b.field(g);
        for s in [-0.9, -0.4, 0.3, 0.9] {
            let inner_f = Field::from_fn(g, |x| (-s * x).exp() * b.eval(x));
            let lhs = s_apply(&inner_f).map_with_x(|x, c| (s * x).exp() * c);
            let rhs = s_apply(&gf) + gf.derivative() * s - gf.scale_real(0.5 * s * s);
            // Away from the profile the weight e^{sx} only amplifies round-off.
            let d = (lhs - rhs).map_with_x(|x, c| if x.abs() <= 10.0 { c } else { C64::new(0.0, 0.0) });
            let e = l2_norm(&d);
            assert!(e <= 1e-9, "s={s}: {e:e}");
        }
    }
}

#[test]
fn solve_examples_and_orthogonality() {
    let op = ReferenceOperator::reference();
    let g = op.grid();
    // F = -iφ′ is solved by ixφ, which is already orthogonal to the kernel.
    let f = Field::from_fn(g, |x| -I * sech_prime(x));
    let rho = s_solve(&f).unwrap();
    assert!(l2_norm(&(s_apply(&rho.field) - &f)) < 1e-8 * l2_norm(&f));
    let ixphi = Field::from_fn(g, |x| I * (x * sech(x)));
    assert!(h1_norm(&(&rho.field - &ixphi)) < 1e-8);

    let [dmu, da, dth, dv] = reference_frame(g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let src = Bumps::random(&mut rng).field(g);
        let big = reference_source(&src).unwrap();
        let n = l2_norm(&big);
        for d in [&dmu, &da, &dth, &dv] {
            assert!(inner(&big, d).abs() < 1e-10 * n);
        }
        let r = s_solve(&big).unwrap();
        assert!(!r.projected);
        let rn = l2_norm(&r.field);
        let jr = r.field.scale(I);
        for (v, d) in [(&r.field, &dth), (&r.field, &da), (&jr, &dth), (&jr, &da)] {
            assert!(inner(v, d).abs() < 1e-8 * rn * l2_norm(d));
        }
    }
}

#[test]
fn decay_transfer() {
    let op = ReferenceOperator::reference();
    let g = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = op.deflate(&Bumps::random(&mut rng).field(g));
        let rho = s_solve(&f).unwrap();
        let c = weighted_h2_norm(&rho.field, DECAY_RATE) / weighted_norm(&f, DECAY_RATE);
        worst = worst.max(c);
    }
    assert!(worst < 100.0, "{worst}");
}

fn params_samples() -> [SolitonParams; 4] {
    [
        SolitonParams::new(1.0, 0.0, 0.0, 0.0),
        SolitonParams::new(1.2, 1.3, 0.4, 0.3),
        SolitonParams::new(0.85, -2.0, -1.1, -0.25),
        SolitonParams::new(1.05, 0.7, 2.0, 0.05),
    ]
}

#[test]
fn derivative_pullback_table() {
    let (sim, reference) = (sim_grid(), reference_grid());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let eps = 1e-3;
    for _ in 0..20 {
        let b = Bumps::random(&mut rng);
        let rho = b.field(reference);
        for p in params_samples() {
            let (mu, v) = (p.mu, p.v);
            let expect = [
                rho.map_with_x(|x, c| x * c).derivative() - rho.map_with_x(|x, c| I * (v / (mu * mu) * x) * c),
                rho.derivative().scale_real(-mu * mu) - rho.scale(I * v),
                rho.scale(I * mu),
                rho.map_with_x(|x, c| I * (x / mu) * c),
            ];
            for (k, e) in expect.iter().enumerate() {
                let at = |s: f64| {
                    let mut q = p.to_array();
                    q[k] += s;
                    group_apply_fn(&SolitonParams::from_array(q), |y| b.eval(y), sim)
                };
                let d = (at(eps) * 8.0 - at(-eps) * 8.0 - at(2.0 * eps) + at(-2.0 * eps)) * (1.0 / (12.0 * eps));
                let pulled = group_adjoint(&p, &d, reference).unwrap();
                let err = l2_norm(&(pulled - e)) / l2_norm(e).max(1.0);
                assert!(err < 1e-8, "k={k} p={p:?}: {err:e}");
            }
        }
    }
}

/// `H″(u)w = -½w_xx - 2|u|²w - u² conj(w)`.
fn h_second(u: &Field, w: &Field) -> Field {
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

#[test]
fn hessian_pullback() {
    let (sim, reference) = (sim_grid(), reference_grid());
    let phi = Field::from_real_fn(reference, sech);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..10 {
        let b = Bumps::random(&mut rng);
        let rho = b.field(reference);
        for p in params_samples() {
            let gphi = Field::from_fn(sim, |x| eta(&p, x));
            let grho = group_apply_fn(&p, |y| b.eval(y), sim);
            let lhs = group_adjoint(&p, &h_second(&gphi, &grho).scale(-I), reference).unwrap();
            let (mu, v) = (p.mu, p.v);
            let rhs = h_second(&phi, &rho).scale(C64::new(0.0, -mu.powi(3))) - rho.derivative().scale_real(mu * v)
                - rho.scale(I * (0.5 * v * v / mu));
            let err = h1_norm(&(lhs - rhs));
            assert!(err < 1e-8, "{p:?}: {err:e}");
        }
    }
}

#[test]
fn projection_pullback() {
    let (sim, reference) = (sim_grid(), reference_grid());
    let frame0 = Frame::single(&SolitonParams::REFERENCE, reference);
    let a0 = pairing_matrix(&frame0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..10 {
        let b = Bumps::random(&mut rng);
        let f = b.field(reference);
        for p in params_samples() {
            let frame = Frame::single(&p, sim);
            let a = pairing_matrix(&frame).unwrap();
            let jgf = group_apply_fn(&p, |y| b.eval(y), sim).scale(-I);
            let lhs = group_adjoint(&p, &project(&frame, &a, &jgf), reference).unwrap();
            let rhs = project(&frame0, &a0, &f.scale(-I)) * p.mu;
            let err = l2_norm(&(lhs - rhs));
            assert!(err < 1e-8, "{p:?}: {err:e}");
        }
    }
}
