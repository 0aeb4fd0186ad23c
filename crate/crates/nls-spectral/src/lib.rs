//! Uniform periodic grids and complex fields sampled on them.
//!
//! Integrals are `dx * sum` over nodes, derivatives are Fourier multipliers.
//! The real inner product is `<u, v> = Re ∫ u conj(v)` and the symplectic
//! pairing is `ω(u, v) = <u, i v>`.

mod error;
mod fft;
mod field;
mod functionals;
mod grid;
pub mod io;

pub use error::SpectralError;
pub use field::Field;
pub use functionals::{
    derivative, h1_norm, hamiltonian, inner, l2_norm, mass, momentum, symplectic_pair,
};
pub use grid::Grid;
pub use num_complex::Complex64 as C64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);
