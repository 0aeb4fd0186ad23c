use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

struct Plans {
    planner: FftPlanner<f64>,
    cached: Vec<(usize, Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

thread_local! {
    static PLANS: RefCell<Plans> = RefCell::new(Plans {
        planner: FftPlanner::new(),
        cached: Vec::new(),
    });
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some((_, f, b)) = p.cached.iter().find(|(m, _, _)| *m == n) {
            return (f.clone(), b.clone());
        }
        let f = p.planner.plan_fft_forward(n);
        let b = p.planner.plan_fft_inverse(n);
        p.cached.push((n, f.clone(), b.clone()));
        (f, b)
    })
}

/// Unnormalized forward transform, `û_m = Σ_j u_j e^{-2πi jm/n}`.
pub(crate) fn forward(data: &mut [Complex64]) {
    plans(data.len()).0.process(data);
}

/// Inverse transform including the `1/n` factor.
pub(crate) fn inverse(data: &mut [Complex64]) {
    let n = data.len();
    plans(n).1.process(data);
    let s = 1.0 / n as f64;
    for c in data.iter_mut() {
        *c *= s;
    }
}
