//! Fundamental solution of the free-space fractional Fokker-Planck equation.
//!
//! The density is represented as a radial Fourier-Bessel integral whose
//! integrand mixes a Gaussian factor, a stretched-exponential factor that is
//! not smooth at the origin, and an oscillatory Bessel kernel with slow decay.
//! The crate splits the integral at a fixed radius: the singular part is
//! handled by expansion or re-weighted quadrature rules, the tail by windowed
//! truncation over a doubling sequence of intervals. A thin solver layer
//! dispatches on the problem parameters and applies the self-similarity
//! rescaling that keeps both pieces in their accurate regimes.

pub mod error;
pub mod farfield;
pub mod oracles;
pub mod quadrature;
pub mod singular;
pub mod solver;
pub mod special;
pub mod window;

pub use error::{Error, Result};
