//! Smooth partition-of-unity window used to truncate far-field integrals.
//!
//! w(z) equals 1 on [0, gamma M], 0 beyond M, and transitions with a C-infinity
//! bump profile in between, so truncating at M instead of infinity costs only a
//! super-algebraically small error.

/// Window geometry: outer radius `m` and plateau fraction `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub m: f64,
    pub gamma: f64,
}

impl WindowSpec {
    /// Window with the default plateau fraction gamma = 0.5.
    pub fn new(m: f64) -> Self {
        WindowSpec { m, gamma: 0.5 }
    }

    pub fn with_gamma(m: f64, gamma: f64) -> Self {
        debug_assert!(m > 0.0 && gamma > 0.0 && gamma < 1.0);
        WindowSpec { m, gamma }
    }
}

/// Evaluate the window at z (total on the reals through |z|).
pub fn window(z: f64, spec: &WindowSpec) -> f64 {
    let s = (z.abs() - spec.gamma * spec.m) / (spec.m - spec.gamma * spec.m);
    // exp(-1/s^2) underflows well before s reaches 3.7e-2; return the plateau
    // value exactly there instead of forming 1/s^2 (infinite at s = 0)
    if s <= 1e-8 {
        return 1.0;
    }
    if s >= 1.0 - 1e-16 {
        return 0.0;
    }
    let bump = (-1.0 / (s * s)).exp();
    (-2.0 * bump / ((1.0 - s) * (1.0 - s))).exp()
}
