//! Assembly of the fundamental solution from the two integrators.
//!
//! The density in dimension d is a radial integral over the Fourier variable
//! r: a cosine kernel for d = 1, a Bessel kernel J_{(d-2)/2}(y r) otherwise,
//! both against exp(-(D_o r^2 + D_f r^{2 alpha}) t). The integral is split at
//! r = 1 into the singular piece (near-origin module) and the slowly decaying
//! tail (far-field module). A self-similarity law in t lets the solver move
//! awkward parameter combinations (large displacement, very small t) to an
//! equivalent problem where both integrators are accurate.

use crate::error::{Error, Result};
use crate::farfield::{integrate_slow_decay, FarFieldConfig, FarFieldReport};
use crate::quadrature::{two_prod, RuleCache};
use crate::singular::{integrate_singular, SingularConfig};
use crate::special::{bessel_j, gamma_fn, surface_area_sphere, upper_incomplete_gamma};

const TAU_2PI: f64 = 2.0 * std::f64::consts::PI;

/// Problem definition: dimension, drift, diffusion coefficients, fractional
/// exponent, and source location.
#[derive(Debug, Clone)]
pub struct ProblemParams {
    pub d: u32,
    pub b: Vec<f64>,
    pub d_o: f64,
    pub d_f: f64,
    pub alpha: f64,
    pub x0: Vec<f64>,
}

impl ProblemParams {
    /// Isotropic problem with zero drift centered at the origin.
    pub fn centered(d: u32, alpha: f64, d_o: f64, d_f: f64) -> Self {
        ProblemParams {
            d,
            b: vec![0.0; d as usize],
            d_o,
            d_f,
            alpha,
            x0: vec![0.0; d as usize],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::Argument("dimension d must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Argument(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        if !(self.d_o >= 0.0) || !(self.d_f >= 0.0) {
            return Err(Error::Argument(format!(
                "diffusion coefficients D_o = {}, D_f = {} must be >= 0",
                self.d_o, self.d_f
            )));
        }
        if self.d_o + self.d_f <= 0.0 {
            return Err(Error::Argument("diffusion must not vanish: D_o + D_f > 0".into()));
        }
        if self.b.len() != self.d as usize {
            return Err(Error::DimensionMismatch { expected: self.d as usize, got: self.b.len() });
        }
        if self.x0.len() != self.d as usize {
            return Err(Error::DimensionMismatch { expected: self.d as usize, got: self.x0.len() });
        }
        Ok(())
    }
}

/// Where and when to evaluate. The density is radial in y = |x - x0 - b t|,
/// so the displacement magnitude may also be given directly.
#[derive(Debug, Clone)]
pub struct EvalRequest {
    pub position: Position,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub enum Position {
    Point(Vec<f64>),
    Radial(f64),
}

impl EvalRequest {
    pub fn at_point(x: Vec<f64>, t: f64) -> Self {
        EvalRequest { position: Position::Point(x), t }
    }

    pub fn radial(y: f64, t: f64) -> Self {
        EvalRequest { position: Position::Radial(y), t }
    }
}

/// Which representation produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Gaussian,
    ZeroDispClosed,
    ZeroDispQuad,
    Dim1,
    Bessel,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub branch: Branch,
    pub used_scaling: bool,
    pub scaled_t: Option<f64>,
    pub scaled_do: Option<f64>,
    /// Far-field loop report when quadrature was used; a non-converged report
    /// means the value may have lost accuracy.
    pub farfield: Option<FarFieldReport>,
}

#[derive(Debug, Clone)]
pub struct SolutionValue {
    pub density: f64,
    pub diagnostics: Diagnostics,
}

impl SolutionValue {
    /// Whether every quadrature stage reported convergence.
    pub fn converged(&self) -> bool {
        self.diagnostics.farfield.as_ref().map_or(true, |r| r.converged)
    }
}

/// Displacement magnitude y = |x - x0 - b t| for the request.
pub fn displacement(params: &ProblemParams, request: &EvalRequest) -> Result<f64> {
    match &request.position {
        Position::Radial(y) => {
            if *y < 0.0 {
                return Err(Error::Argument(format!("radial displacement y = {y} must be >= 0")));
            }
            Ok(*y)
        }
        Position::Point(x) => {
            if x.len() != params.d as usize {
                return Err(Error::DimensionMismatch { expected: params.d as usize, got: x.len() });
            }
            let mut sum = 0.0;
            for i in 0..x.len() {
                let c = x[i] - params.x0[i] - params.b[i] * request.t;
                sum += c * c;
            }
            Ok(sum.sqrt())
        }
    }
}

/// Classical diffusion density, valid only when the fractional part vanishes.
pub fn gaussian_fallback(y: f64, t: f64, params: &ProblemParams) -> Result<f64> {
    if params.d_f > 0.0 {
        return Err(Error::Branch(
            "gaussian fallback requires D_f = 0; the fractional kernel is not Gaussian".into(),
        ));
    }
    if !(params.d_o > 0.0) {
        return Err(Error::Argument("gaussian fallback requires D_o > 0".into()));
    }
    let var = 4.0 * params.d_o * t;
    Ok((std::f64::consts::PI * var).powf(-(params.d as f64) / 2.0) * (-y * y / var).exp())
}

/// Scaled time T for the zero-displacement path: large enough that the radial
/// integrand has decayed below `target` (relative) by r = R, so the far-field
/// loop terminates immediately. None when t itself already suffices.
pub fn select_scaling_t(t: f64, params: &ProblemParams, target: f64) -> Option<f64> {
    if params.d_o == 0.0 || !target.is_finite() {
        return None;
    }
    let r = 80.0f64;
    let d = params.d as f64;
    let alpha = params.alpha;
    // relative tail of int r^{d-1} exp(-(xi1 r^2 + xi2 r^{2a})) dr beyond R,
    // bounding the tail by whichever factor decays faster and the total from
    // below by the faster-decaying closed form
    let rel_tail = |cap_t: f64| -> f64 {
        let xi1 = (t / cap_t).powf(1.0 - 1.0 / alpha) * params.d_o * cap_t;
        let xi2 = params.d_f * cap_t;
        let tail = |p: f64, xi: f64| {
            let s = d / p;
            upper_incomplete_gamma(s, xi * r.powf(p)).unwrap_or(f64::INFINITY) / (xi.powf(s) * p)
        };
        let total = |p: f64, xi: f64| {
            let s = d / p;
            gamma_fn(s).unwrap_or(f64::INFINITY) / (xi.powf(s) * p)
        };
        let t1 = tail(2.0, xi1) / total(2.0, xi1);
        let t2 = tail(2.0 * alpha, xi2) / total(2.0 * alpha, xi2);
        t1.min(t2)
    };
    if rel_tail(t) <= target {
        return None;
    }
    let (mut lo, mut hi) = (t, 1e6 * t);
    if rel_tail(hi) > target {
        return Some(hi);
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if rel_tail(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Cosine of y * (r + rlo) with the product formed exactly, so large phases
/// do not lose absolute accuracy to rounding of the argument.
fn cos_phase(y: f64, r: f64, rlo: f64) -> f64 {
    let (ph, pe) = two_prod(y, r);
    let corr = pe + y * rlo;
    ph.cos() - corr * ph.sin()
}

/// J_nu at y * (r + rlo) with the same phase care; the low part enters
/// through the derivative J_nu' = J_{nu-1} - (nu/x) J_nu.
fn bessel_phase(nu: f64, y: f64, r: f64, rlo: f64) -> Result<f64> {
    let (ph, pe) = two_prod(y, r);
    let corr = pe + y * rlo;
    let j = bessel_j(nu, ph)?;
    let dj = if nu == 0.0 {
        -bessel_j(1.0, ph)?
    } else if ph > 0.0 {
        if nu >= 0.5 {
            bessel_j(nu - 1.0, ph)? - nu / ph * j
        } else {
            // downward form keeps the companion order within the supported
            // range for nu = -1/2
            nu / ph * j - bessel_j(nu + 1.0, ph)?
        }
    } else {
        0.0
    };
    Ok(j + corr * dj)
}

/// Shared configuration and rule cache for repeated evaluations.
#[derive(Debug, Default)]
pub struct Solver {
    pub singular: SingularConfig,
    pub farfield: FarFieldConfig,
    pub cache: RuleCache,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Both integrator halves of int_0^inf f(r) exp(-r^{2 alpha} tau) dr with
    /// the split at r = 1.
    fn split_integral<F: Fn(f64, f64) -> f64>(
        &self,
        f: F,
        alpha: f64,
        tau: f64,
        points_per_unit: f64,
        singular: &SingularConfig,
    ) -> Result<(f64, FarFieldReport)> {
        let cfg = FarFieldConfig { points_per_unit, ..self.farfield.clone() };
        let far = integrate_slow_decay(&f, 1.0, alpha, tau, &cfg, &self.cache)?;
        let near = integrate_singular(|r| f(r, 0.0), 1.0, alpha, tau, singular, &self.cache)?;
        Ok((near + far.value, far))
    }

    /// Density at y = 0 (Algorithm for the zero-displacement case). With
    /// D_o = 0 the integral is a Gamma function and is evaluated in closed
    /// form; otherwise both integrators run on the radial representation.
    pub fn solve_zero_displacement(&self, t: f64, params: &ProblemParams) -> Result<SolutionValue> {
        let d = params.d as f64;
        let alpha = params.alpha;
        if !(params.d_f > 0.0) {
            return Err(Error::Branch("zero-displacement path requires D_f > 0".into()));
        }
        if params.d_o == 0.0 {
            let density = surface_area_sphere(params.d) / (TAU_2PI.powi(params.d as i32) * d)
                * (params.d_f * t).powf(-d / (2.0 * alpha))
                * gamma_fn(d / (2.0 * alpha) + 1.0)?;
            return Ok(SolutionValue {
                density,
                diagnostics: Diagnostics {
                    branch: Branch::ZeroDispClosed,
                    used_scaling: false,
                    scaled_t: None,
                    scaled_do: None,
                    farfield: None,
                },
            });
        }
        let d_o = params.d_o;
        let f = move |r: f64, _: f64| (r / TAU_2PI).powi(params.d as i32 - 1) * (-d_o * r * r * t).exp();
        let tau = params.d_f * t;
        let singular = SingularConfig {
            n: self.singular.n.max(16 + (d_o * t).ceil() as usize),
            ..self.singular.clone()
        };
        let (g, far) =
            self.split_integral(f, alpha, tau, self.farfield.points_per_unit, &singular)?;
        Ok(SolutionValue {
            density: surface_area_sphere(params.d) / TAU_2PI * g,
            diagnostics: Diagnostics {
                branch: Branch::ZeroDispQuad,
                used_scaling: false,
                scaled_t: None,
                scaled_do: None,
                farfield: Some(far),
            },
        })
    }

    /// Density at y > 0 (Algorithm for the nonzero-displacement case): cosine
    /// representation for d = 1, Bessel representation for d >= 2.
    pub fn solve_radial(&self, y: f64, t: f64, params: &ProblemParams) -> Result<SolutionValue> {
        if !(y > 0.0) {
            return Err(Error::Argument(format!("solve_radial requires y > 0, got {y}")));
        }
        if !(params.d_f > 0.0) {
            return Err(Error::Branch("radial quadrature path requires D_f > 0".into()));
        }
        let alpha = params.alpha;
        let tau = params.d_f * t;
        let d_o = params.d_o;
        // keep a few quadrature points per oscillation of the kernel; the
        // default 4 per unit is calibrated for O(1) frequencies. Rounded up
        // to an integer so nearby displacements share cached rules.
        let ppu = self.farfield.points_per_unit.max((1.6 * y).ceil());
        // the re-weighted singular rule is exact only up to polynomial degree
        // n - 1, so the node count must grow with the kernel frequency and
        // with the decay rate of the Gaussian factor to keep
        // cos(y r) J_nu(y r) exp(-D_o t r^2) resolvable on [0, 1]
        let singular = SingularConfig {
            n: self.singular.n.max(16 + (1.2 * y + d_o * t).ceil() as usize),
            ..self.singular.clone()
        };
        if params.d == 1 {
            let f = move |r: f64, rlo: f64| cos_phase(y, r, rlo) * (-d_o * r * r * t).exp();
            let (g, far) = self.split_integral(f, alpha, tau, ppu, &singular)?;
            return Ok(SolutionValue {
                density: g / std::f64::consts::PI,
                diagnostics: Diagnostics {
                    branch: Branch::Dim1,
                    used_scaling: false,
                    scaled_t: None,
                    scaled_do: None,
                    farfield: Some(far),
                },
            });
        }
        let nu = (params.d as f64 - 2.0) / 2.0;
        let half_d = params.d as f64 / 2.0;
        let f = move |r: f64, rlo: f64| {
            let kernel = bessel_phase(nu, y, r, rlo).unwrap_or(f64::NAN);
            (r / TAU_2PI).powf(half_d) * kernel * (-d_o * r * r * t).exp()
        };
        let (g, far) = self.split_integral(f, alpha, tau, ppu, &singular)?;
        Ok(SolutionValue {
            density: g / y.powf(nu),
            diagnostics: Diagnostics {
                branch: Branch::Bessel,
                used_scaling: false,
                scaled_t: None,
                scaled_do: None,
                farfield: Some(far),
            },
        })
    }

    /// Full dispatch: Gaussian fallback, zero displacement (optionally moved
    /// to a larger time T), direct radial evaluation, and the rescale to
    /// y = pi/2 for large displacements or a non-converged far field.
    pub fn solve(&self, request: &EvalRequest, params: &ProblemParams) -> Result<SolutionValue> {
        params.validate()?;
        if !(request.t > 0.0) {
            return Err(Error::Argument(format!("t = {} must be > 0", request.t)));
        }
        let t = request.t;
        let y = displacement(params, request)?;
        if params.d_f == 0.0 {
            let density = gaussian_fallback(y, t, params)?;
            return Ok(SolutionValue {
                density,
                diagnostics: Diagnostics {
                    branch: Branch::Gaussian,
                    used_scaling: false,
                    scaled_t: None,
                    scaled_do: None,
                    farfield: None,
                },
            });
        }
        let d = params.d as f64;
        let alpha = params.alpha;
        if y == 0.0 {
            if let Some(cap_t) = select_scaling_t(t, params, 1e-16) {
                if cap_t > t {
                    let ratio = t / cap_t;
                    let scaled_do = ratio.powf(1.0 - 1.0 / alpha) * params.d_o;
                    let scaled = ProblemParams { d_o: scaled_do, ..params.clone() };
                    let mut value = self.solve_zero_displacement(cap_t, &scaled)?;
                    value.density *= ratio.powf(-d / (2.0 * alpha));
                    value.diagnostics.used_scaling = true;
                    value.diagnostics.scaled_t = Some(cap_t);
                    value.diagnostics.scaled_do = Some(scaled_do);
                    return Ok(value);
                }
            }
            return self.solve_zero_displacement(t, params);
        }
        let y_limit = 10.0;
        if y <= y_limit {
            let value = self.solve_radial(y, t, params)?;
            if value.converged() {
                return Ok(value);
            }
        }
        // move the evaluation point to y = pi/2 with the self-similarity law
        let y_scaled = std::f64::consts::FRAC_PI_2;
        let cap_t = t * (y_scaled / y).powf(2.0 * alpha);
        let ratio = t / cap_t;
        let scaled_do = ratio.powf(1.0 - 1.0 / alpha) * params.d_o;
        let scaled = ProblemParams { d_o: scaled_do, ..params.clone() };
        let mut value = self.solve_radial(y_scaled, cap_t, &scaled)?;
        value.density *= ratio.powf(-d / (2.0 * alpha));
        value.diagnostics.used_scaling = true;
        value.diagnostics.scaled_t = Some(cap_t);
        value.diagnostics.scaled_do = Some(scaled_do);
        Ok(value)
    }
}
