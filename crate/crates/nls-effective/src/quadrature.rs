//! Adaptive Gauss–Kronrod (7/15) quadrature over a fixed initial partition.

use num_complex::Complex64 as C64;

use crate::EffectiveError;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Width of the panels of the initial partition.
    pub panel: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-16, rel_tol: 1e-12, panel: 1.0, max_depth: 40 }
    }
}

fn gk15(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn adapt(
    f: &impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    opts: &QuadOptions,
) -> Result<C64, EffectiveError> {
    let (v, err) = gk15(f, a, b);
    if err <= tol {
        return Ok(v);
    }
    if depth >= opts.max_depth {
        return Err(EffectiveError::Quadrature { a, b, err });
    }
    let m = 0.5 * (a + b);
    Ok(adapt(f, a, m, 0.5 * tol, depth + 1, opts)? + adapt(f, m, b, 0.5 * tol, depth + 1, opts)?)
}

/// `∫_a^b f`. Each panel of the initial partition must meet its share of
/// `max(abs_tol, rel_tol·|I|)`, where `|I|` is estimated from the unrefined sum.
pub fn integrate(f: impl Fn(f64) -> C64, a: f64, b: f64, opts: &QuadOptions) -> Result<C64, EffectiveError> {
    let panels = ((b - a) / opts.panel).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    let first: Vec<(C64, f64)> = (0..panels).map(|k| gk15(&f, a + k as f64 * w, a + (k + 1) as f64 * w)).collect();
    let scale: f64 = first.iter().map(|(v, _)| v.norm()).sum();
    let tol = opts.abs_tol.max(opts.rel_tol * scale) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for (k, (v, err)) in first.into_iter().enumerate() {
        if err <= tol {
            total += v;
        } else {
            total += adapt(&f, a + k as f64 * w, a + (k + 1) as f64 * w, tol, 1, opts)?;
        }
    }
    Ok(total)
}

pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<f64, EffectiveError> {
    Ok(integrate(|x| C64::new(f(x), 0.0), a, b, opts)?.re)
}
