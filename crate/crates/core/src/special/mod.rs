//! Scalar special-function kernels. Pure functions, no global state.

mod bessel;
mod faddeeva;
mod gamma;

pub use bessel::bessel_j;
pub use faddeeva::{erfcx_complex, erfcx_real};
pub use gamma::{gamma_fn, ln_gamma, pochhammer, surface_area_sphere, upper_incomplete_gamma};

/// Complex scalar used throughout the crate.
pub type ComplexValue = num_complex::Complex64;
