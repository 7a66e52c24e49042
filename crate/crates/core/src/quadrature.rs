//! Quadrature rules: Gauss-Legendre, Gauss-Jacobi with weight z^beta on
//! [0, L], and the moment-matched re-weighted rule that is exact against
//! exp(-z^{2 alpha} tau) for polynomials of degree < N.
//!
//! Nodes come from Newton iteration on the recurrence-evaluated orthogonal
//! polynomial (bracketed by a sign-change scan for the Jacobi family, whose
//! roots crowd toward an endpoint for large beta); no linear-algebra
//! dependency is needed. Rules are cached by exact parameter bits so repeated
//! grid evaluations reuse identical rules.

use std::collections::HashMap;
use std::io::Write as IoWrite;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// Weight family a rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    Legendre,
    Jacobi { beta: f64 },
    Reweighted { l: f64, alpha: f64, tau: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    /// Low-order parts of the nodes (node = nodes[j] + nodes_lo[j] in exact
    /// arithmetic). On wide intervals a node of size 10^3 is quantized at
    /// about 1e-13 in f64, which an oscillatory integrand converts directly
    /// into value error; the low parts let `apply_compensated` undo that.
    pub nodes_lo: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to f: sum of w_j f(s_j).
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        // compensated summation: far-field rules run to tens of thousands of
        // oscillating terms and a naive sum costs several ulps of accuracy
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (&s, &w) in self.nodes.iter().zip(&self.weights) {
            let term = w * f(s);
            let t = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        sum + comp
    }

    /// Apply the rule with the node low parts exposed: f receives (hi, lo)
    /// and is expected to evaluate itself at hi + lo (typically by a
    /// first-order correction of its oscillatory factor).
    pub fn apply_compensated<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for ((&s, &slo), &w) in self.nodes.iter().zip(&self.nodes_lo).zip(&self.weights) {
            let term = w * f(s, slo);
            let t = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        sum + comp
    }

    /// Debug dump as CSV rows "node,weight" with 17 significant digits.
    pub fn dump_csv<W: IoWrite>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "node,weight")?;
        for (s, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(out, "{s:.16e},{w:.16e}")?;
        }
        Ok(())
    }
}

// 32-point Gauss-Legendre rule on (-1, 1), frozen from a high-precision
// computation. Used by the graded-panel reference integrator so that the
// re-weighting right-hand sides do not depend on the Newton solver they are
// meant to check.
pub(crate) const GL32_NODES: [f64; 32] = [
    -0.9972638618494815635,
    -0.9856115115452683354,
    -0.9647622555875064308,
    -0.9349060759377396892,
    -0.896321155766052124,
    -0.8493676137325699701,
    -0.794483795967942407,
    -0.7321821187402896804,
    -0.663044266930215201,
    -0.587715757240762329,
    -0.50689990893222939,
    -0.4213512761306353454,
    -0.3318686022821276498,
    -0.2392873622521370745,
    -0.1444719615827964935,
    -0.04830766568773831623,
    0.04830766568773831623,
    0.1444719615827964935,
    0.2392873622521370745,
    0.3318686022821276498,
    0.4213512761306353454,
    0.50689990893222939,
    0.587715757240762329,
    0.663044266930215201,
    0.7321821187402896804,
    0.794483795967942407,
    0.8493676137325699701,
    0.896321155766052124,
    0.9349060759377396892,
    0.9647622555875064308,
    0.9856115115452683354,
    0.9972638618494815635,
];
pub(crate) const GL32_WEIGHTS: [f64; 32] = [
    0.0070186100094700966,
    0.01627439473090567061,
    0.02539206530926205946,
    0.0342738629130214331,
    0.04283589802222668066,
    0.0509980592623761762,
    0.05868409347853554715,
    0.06582222277636184684,
    0.07234579410884850623,
    0.07819389578707030647,
    0.08331192422694675522,
    0.08765209300440381114,
    0.09117387869576388471,
    0.09384439908080456564,
    0.09563872007927485942,
    0.09654008851472780057,
    0.09654008851472780057,
    0.09563872007927485942,
    0.09384439908080456564,
    0.09117387869576388471,
    0.08765209300440381114,
    0.08331192422694675522,
    0.07819389578707030647,
    0.07234579410884850623,
    0.06582222277636184684,
    0.05868409347853554715,
    0.0509980592623761762,
    0.04283589802222668066,
    0.0342738629130214331,
    0.02539206530926205946,
    0.01627439473090567061,
    0.0070186100094700966,
];

/// Fixed 32-point Gauss-Legendre applied to f on [a, b].
pub(crate) fn gl32<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (&x, &w) in GL32_NODES.iter().zip(&GL32_WEIGHTS) {
        acc += w * f(mid + half * x);
    }
    half * acc
}

// Minimal double-double arithmetic for node refinement. A value is a pair
// (hi, lo) with hi + lo carrying roughly twice the f64 precision.

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn dd_mul_f64(ah: f64, al: f64, b: f64) -> (f64, f64) {
    let (p, e) = two_prod(ah, b);
    quick_two_sum(p, e + al * b)
}

#[inline]
fn dd_sub(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (s, e) = two_sum(ah, -bh);
    quick_two_sum(s, e + al - bl)
}

#[inline]
fn dd_div_f64(ah: f64, al: f64, b: f64) -> (f64, f64) {
    let q1 = ah / b;
    let (p, e) = two_prod(q1, b);
    let q2 = (((ah - p) - e) + al) / b;
    quick_two_sum(q1, q2)
}

#[inline]
fn dd_mul(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (p, e) = two_prod(ah, bh);
    quick_two_sum(p, e + ah * bl + al * bh)
}

#[inline]
fn dd_div(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let q1 = ah / bh;
    let (ph, pl) = dd_mul_f64(bh, bl, q1);
    let (rh, _) = dd_sub(ah, al, ph, pl);
    quick_two_sum(q1, rh / bh)
}

/// P_n and P_{n-1} at an exact f64 argument, evaluated in double-double.
/// Used to pin roots well below one ulp and to form the derivative (hence
/// the weights) without the O(sqrt(n)) rounding growth of the f64 recurrence.
fn legendre_eval_dd(n: usize, x: f64) -> (f64, f64, f64, f64) {
    let (mut p0h, mut p0l) = (1.0f64, 0.0f64);
    let (mut p1h, mut p1l) = (x, 0.0f64);
    if n == 0 {
        return (1.0, 0.0, 0.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        // (2k - 1) x P_{k-1} with exact integer coefficients
        let (t1h, t1l) = dd_mul_f64(p1h, p1l, x);
        let (t1h, t1l) = dd_mul_f64(t1h, t1l, 2.0 * kf - 1.0);
        let (t2h, t2l) = dd_mul_f64(p0h, p0l, kf - 1.0);
        let (dh, dl) = dd_sub(t1h, t1l, t2h, t2l);
        let (p2h, p2l) = dd_div_f64(dh, dl, kf);
        p0h = p1h;
        p0l = p1l;
        p1h = p2h;
        p1l = p2l;
    }
    (p1h, p1l, p0h, p0l)
}

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        // endpoints; not reached by interior roots
        0.5 * (n * (n + 1)) as f64 * if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) }
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss-Legendre rule with n points on (a, b).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Argument("gauss_legendre: n must be >= 1".into()));
    }
    if !(a < b) {
        return Err(Error::Argument(format!(
            "gauss_legendre: interval ({a}, {b}) must satisfy a < b"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut nodes_lo = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n / 2;
    // affine map in double-double; the sums a + b and b - a are split exactly
    // and halving is exact
    let (cs, ce) = two_sum(a, b);
    let (mid, mid_lo) = (0.5 * cs, 0.5 * ce);
    let (hs, he) = two_sum(b, -a);
    let (halfw, halfw_lo) = (0.5 * hs, 0.5 * he);
    let map = |x: f64, xlo: f64| -> (f64, f64) {
        // mid + halfw * (x + xlo)
        let (ph, pl) = two_prod(halfw, x);
        let pl = pl + halfw * xlo + halfw_lo * x;
        let (s, e) = two_sum(mid, ph);
        quick_two_sum(s, e + pl + mid_lo)
    };
    let mut place = |i: usize, x: f64, xlo: f64, w: f64| {
        let (z, zlo) = map(x, xlo);
        nodes[i] = z;
        nodes_lo[i] = zlo;
        weights[i] = w * halfw;
    };
    // double-double node and weight at an f64 Newton iterate x: residual
    // correction delta pins the root, and the weight is formed from the
    // dd derivative so neither the recurrence rounding (which grows with n)
    // nor cancellation in 1 - x^2 near the endpoints leaks into the weights
    let refine = |x: f64, dp_f64: f64| -> (f64, f64, f64) {
        let (ph, pl, qh, ql) = legendre_eval_dd(n, x);
        let delta = if dp_f64 != 0.0 { -(ph + pl) / dp_f64 } else { 0.0 };
        // 1 - x^2 as (1 - x)(1 + x); both factors are exact two_sums
        let (omh, oml) = two_sum(1.0, -x);
        let (oph, opl) = two_sum(1.0, x);
        let (s2h, s2l) = dd_mul(omh, oml, oph, opl);
        // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
        let (th, tl) = dd_mul_f64(ph, pl, x);
        let (th, tl) = dd_sub(th, tl, qh, ql);
        let (th, tl) = dd_mul_f64(th, tl, n as f64);
        let (dph, _) = dd_div(th, tl, -s2h, -s2l);
        // shift derivative and 1 - x^2 from x to the root x + delta; near the
        // endpoints delta / (1 - x^2) is large enough to matter
        let dp_root = dph * (1.0 + delta * 2.0 * x / s2h);
        let s2_root = s2h * (1.0 - delta * 2.0 * x / s2h) + s2l;
        let w = 2.0 / (s2_root * dp_root * dp_root);
        (x, delta, w)
    };
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = -p / dp;
            x += dx;
            if dx.abs() < 1e-15 {
                let (p, d) = legendre_eval(n, x);
                dp = d;
                x -= p / dp;
                break;
            }
        }
        let (x, xlo, w) = refine(x, dp);
        // i counts from the +1 end; store symmetric pair
        place(n - 1 - i, x, xlo, w);
        place(i, -x, -xlo, w);
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_eval(n, 0.0);
        let (_, _, w) = refine(0.0, dp);
        place(half, 0.0, 0.0, w);
    }
    Ok(QuadratureRule {
        nodes,
        nodes_lo,
        weights,
        interval: (a, b),
        kind: RuleKind::Legendre,
    })
}

/// Jacobi P_n^{(0,beta)}(x) and its derivative.
fn jacobi_eval(n: usize, b: f64, x: f64) -> (f64, f64, f64) {
    // returns (P_n, P_n', P_{n-1})
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (b + 2.0) * x - 0.5 * b;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let c0 = 2.0 * kf + b;
        let a1 = (c0 - 1.0) * ((c0 * (c0 - 2.0)) * x - b * b);
        let a2 = 2.0 * (kf - 1.0) * (kf + b - 1.0) * c0;
        let denom = 2.0 * kf * (kf + b) * (c0 - 2.0);
        let p2 = (a1 * p1 - a2 * p0) / denom;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let c0 = 2.0 * nf + b;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        f64::NAN
    } else {
        (nf * (-b - c0 * x) * p1 + 2.0 * nf * (nf + b) * p0) / (c0 * (1.0 - x * x))
    };
    (p1, dp, p0)
}

/// Gauss-Jacobi rule for the weight z^beta on [0, L]:
/// integral of f(z) z^beta dz ~ sum w_j f(s_j), exact for deg f <= 2n-1.
pub fn gauss_jacobi_beta(n: usize, beta: f64, l: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Argument("gauss_jacobi_beta: n must be >= 1".into()));
    }
    if !(beta > -1.0) {
        return Err(Error::Argument(format!(
            "gauss_jacobi_beta: beta = {beta} must be > -1"
        )));
    }
    if !(l > 0.0) {
        return Err(Error::Argument(format!("gauss_jacobi_beta: L = {l} must be > 0")));
    }
    // bracket the n roots of P_n^{(0,beta)} by a sign scan, then bisect and
    // polish with Newton; large beta crowds the roots toward +1, so Newton
    // from cos-spaced guesses alone is not reliable. The scan grid carries an
    // irrational offset so symmetric roots (beta = 0) never land on a sample.
    let scan = 128 * n;
    let mut brackets = Vec::with_capacity(n);
    let grid = |i: usize| -1.0 + 2.0 * (i as f64 + 0.381_966_011_250_105) / (scan as f64 + 1.0);
    let mut xa = grid(0);
    let mut fa = jacobi_eval(n, beta, xa).0;
    for i in 1..=scan {
        let xb = grid(i);
        let fb = jacobi_eval(n, beta, xb).0;
        if fa * fb < 0.0 {
            brackets.push((xa, fa, xb));
        }
        xa = xb;
        fa = fb;
    }
    if brackets.len() != n {
        return Err(Error::RuleConstruction(format!(
            "gauss_jacobi_beta: found {} of {n} root brackets (beta = {beta})",
            brackets.len()
        )));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // A&S 25.4.33 weight prefactor, specialized to alpha_J = 0; the minus
    // sign absorbs the sign of P_n' P_{n+1} at an interior root
    let nf = n as f64;
    let pref = -(2.0 * nf + beta + 2.0) * 2.0f64.powf(beta) / ((nf + beta + 1.0) * (nf + 1.0));
    for (mut lo, mut flo, mut hi) in brackets {
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            let fm = jacobi_eval(n, beta, mid).0;
            if flo * fm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let (p, dp, _) = jacobi_eval(n, beta, x);
            if dp != 0.0 {
                x -= p / dp;
            }
        }
        let (_, dp, _) = jacobi_eval(n, beta, x);
        let pnp1 = jacobi_eval(n + 1, beta, x).0;
        let w = pref / (dp * pnp1);
        nodes.push(x);
        weights.push(w);
    }
    // map from weight (1+x)^beta on (-1,1) to z^beta on (0, L)
    let scale = (l / 2.0).powf(beta + 1.0);
    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        *x = l * (*x + 1.0) / 2.0;
        *w *= scale;
    }
    let nodes_lo = vec![0.0; n];
    Ok(QuadratureRule {
        nodes,
        nodes_lo,
        weights,
        interval: (0.0, l),
        kind: RuleKind::Jacobi { beta },
    })
}

/// Shifted Legendre polynomial P_k(2z/L - 1).
fn shifted_legendre(k: usize, z: f64, l: f64) -> f64 {
    legendre_eval_value(k, 2.0 * z / l - 1.0)
}

fn legendre_eval_value(n: usize, x: f64) -> f64 {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return 1.0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Reference integral of f(z) exp(-z^{2 alpha} tau) over [0, L] by composite
/// Gauss-Legendre on panels graded geometrically toward the origin (ratio
/// 1/2, smallest panel <= 1e-10 L, 32 points per panel). Resolves the
/// unbounded derivative of z^{2 alpha} at 0 for alpha < 1/2.
pub fn reference_singular_integral<F: Fn(f64) -> f64>(f: F, l: f64, alpha: f64, tau: f64) -> f64 {
    let weighted = |z: f64| f(z) * (-z.powf(2.0 * alpha) * tau).exp();
    let mut hi = l;
    let mut acc = 0.0;
    while hi > 1e-10 * l {
        let lo = hi / 2.0;
        acc += gl32(lo, hi, weighted);
        hi = lo;
    }
    acc += gl32(0.0, hi, weighted);
    acc
}

/// Solve the square system A x = b by Householder QR. A is row-major.
fn solve_householder(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        // Householder vector for column k
        let mut norm = 0.0;
        for row in a.iter().take(n).skip(k) {
            norm += row[k] * row[k];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return Err(Error::RuleConstruction("singular moment matrix".into()));
        }
        let sign = if a[k][k] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] += sign * norm;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // apply I - 2 v v^T / (v^T v) to remaining columns and to b
        for j in k..n {
            let dot: f64 = (k..n).map(|i| v[i - k] * a[i][j]).sum();
            let c = 2.0 * dot / vnorm2;
            for i in k..n {
                a[i][j] -= c * v[i - k];
            }
        }
        let dot: f64 = (k..n).map(|i| v[i - k] * b[i]).sum();
        let c = 2.0 * dot / vnorm2;
        for i in k..n {
            b[i] -= c * v[i - k];
        }
    }
    // back substitution on R
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        if a[i][i] == 0.0 {
            return Err(Error::RuleConstruction("singular triangular factor".into()));
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

/// Re-weighted rule: Legendre nodes on [0, L] with weights chosen so that the
/// rule is exact against exp(-z^{2 alpha} tau) for polynomials of degree < N.
pub fn reweighted_rule(n: usize, l: f64, alpha: f64, tau: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Argument("reweighted_rule: N must be >= 1".into()));
    }
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::Argument(format!("reweighted_rule: L = {l} must be in (0, 1]")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!(
            "reweighted_rule: alpha = {alpha} must be in (0, 1)"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::Argument(format!("reweighted_rule: tau = {tau} must be > 0")));
    }
    let base = gauss_legendre(n, 0.0, l)?;
    let nodes = base.nodes;
    // Legendre-basis Vandermonde and graded-panel moments
    let mut a = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    for k in 0..n {
        a.push(nodes.iter().map(|&s| shifted_legendre(k, s, l)).collect::<Vec<_>>());
        m.push(reference_singular_integral(|z| shifted_legendre(k, z, l), l, alpha, tau));
    }
    let weights = solve_householder(a.clone(), m.clone())?;
    // mandatory residual check against the zeroth moment scale
    let scale = m[0].abs();
    for (k, (row, &mk)) in a.iter().zip(&m).enumerate() {
        let got: f64 = row.iter().zip(&weights).map(|(p, w)| p * w).sum();
        if (got - mk).abs() > 1e-12 * scale {
            return Err(Error::RuleConstruction(format!(
                "reweighted_rule: moment {k} residual {:e} exceeds tolerance",
                (got - mk).abs()
            )));
        }
    }
    // the weights were solved for these f64 nodes, so the nodes are exact by
    // construction and carry no low parts
    let nodes_lo = vec![0.0; n];
    Ok(QuadratureRule {
        nodes,
        nodes_lo,
        weights,
        interval: (0.0, l),
        kind: RuleKind::Reweighted { l, alpha, tau },
    })
}

/// Cache key with bit-exact parameter comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKey {
    Legendre { n: usize, a: u64, b: u64 },
    Jacobi { n: usize, beta: u64, l: u64 },
    Reweighted { n: usize, l: u64, alpha: u64, tau: u64 },
}

/// Shared cache of constructed rules. Reads are concurrent; insertion takes
/// the write lock. A hit returns the identical (shared) rule.
#[derive(Debug, Default)]
pub struct RuleCache {
    map: RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>,
}

impl RuleCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get_or_insert(
        &self,
        key: RuleKey,
        build: impl FnOnce() -> Result<QuadratureRule>,
    ) -> Result<Arc<QuadratureRule>> {
        if let Some(rule) = self.map.read().expect("cache lock poisoned").get(&key) {
            return Ok(rule.clone());
        }
        let rule = Arc::new(build()?);
        let mut map = self.map.write().expect("cache lock poisoned");
        Ok(map.entry(key).or_insert(rule).clone())
    }

    pub fn legendre(&self, n: usize, a: f64, b: f64) -> Result<Arc<QuadratureRule>> {
        let key = RuleKey::Legendre { n, a: a.to_bits(), b: b.to_bits() };
        self.get_or_insert(key, || gauss_legendre(n, a, b))
    }

    pub fn jacobi(&self, n: usize, beta: f64, l: f64) -> Result<Arc<QuadratureRule>> {
        let key = RuleKey::Jacobi { n, beta: beta.to_bits(), l: l.to_bits() };
        self.get_or_insert(key, || gauss_jacobi_beta(n, beta, l))
    }

    pub fn reweighted(&self, n: usize, l: f64, alpha: f64, tau: f64) -> Result<Arc<QuadratureRule>> {
        let key = RuleKey::Reweighted {
            n,
            l: l.to_bits(),
            alpha: alpha.to_bits(),
            tau: tau.to_bits(),
        };
        self.get_or_insert(key, || reweighted_rule(n, l, alpha, tau))
    }

    /// Whether a re-weighted rule for these parameters is already present.
    pub fn has_reweighted(&self, n: usize, l: f64, alpha: f64, tau: f64) -> bool {
        let key = RuleKey::Reweighted {
            n,
            l: l.to_bits(),
            alpha: alpha.to_bits(),
            tau: tau.to_bits(),
        };
        self.map.read().expect("cache lock poisoned").contains_key(&key)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Persist all cached rules to a binary file (little-endian f64 arrays
    /// behind a versioned header).
    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        let map = self.map.read().expect("cache lock poisoned");
        let mut out = Vec::new();
        out.extend_from_slice(b"FFPERULE");
        out.extend_from_slice(&2u32.to_le_bytes());
        out.extend_from_slice(&(map.len() as u64).to_le_bytes());
        let mut entries: Vec<_> = map.iter().collect();
        entries.sort_by_key(|(k, _)| format!("{k:?}"));
        for (key, rule) in entries {
            let (tag, p): (u8, [u64; 4]) = match *key {
                RuleKey::Legendre { n, a, b } => (0, [n as u64, a, b, 0]),
                RuleKey::Jacobi { n, beta, l } => (1, [n as u64, beta, l, 0]),
                RuleKey::Reweighted { n, l, alpha, tau } => (2, [n as u64, l, alpha, tau]),
            };
            out.push(tag);
            for v in p {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out.extend_from_slice(&rule.interval.0.to_le_bytes());
            out.extend_from_slice(&rule.interval.1.to_le_bytes());
            out.extend_from_slice(&(rule.len() as u64).to_le_bytes());
            for &x in &rule.nodes {
                out.extend_from_slice(&x.to_le_bytes());
            }
            for &x in &rule.nodes_lo {
                out.extend_from_slice(&x.to_le_bytes());
            }
            for &w in &rule.weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        std::fs::write(path, out)
    }

    /// Load rules previously written by `save` into this cache.
    pub fn load(&self, path: &std::path::Path) -> std::io::Result<()> {
        let data = std::fs::read(path)?;
        let bad = || std::io::Error::new(std::io::ErrorKind::InvalidData, "malformed rule cache");
        let mut pos = 0usize;
        let take = |pos: &mut usize, n: usize| -> std::io::Result<&[u8]> {
            let s = data.get(*pos..*pos + n).ok_or_else(bad)?;
            *pos += n;
            Ok(s)
        };
        if take(&mut pos, 8)? != b"FFPERULE" {
            return Err(bad());
        }
        let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
        if version != 2 {
            return Err(bad());
        }
        let count = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let read_u64 =
            |pos: &mut usize| -> std::io::Result<u64> { Ok(u64::from_le_bytes(take(pos, 8)?.try_into().unwrap())) };
        let mut map = self.map.write().expect("cache lock poisoned");
        for _ in 0..count {
            let tag = take(&mut pos, 1)?[0];
            let p = [
                read_u64(&mut pos)?,
                read_u64(&mut pos)?,
                read_u64(&mut pos)?,
                read_u64(&mut pos)?,
            ];
            let (key, kind) = match tag {
                0 => (
                    RuleKey::Legendre { n: p[0] as usize, a: p[1], b: p[2] },
                    RuleKind::Legendre,
                ),
                1 => (
                    RuleKey::Jacobi { n: p[0] as usize, beta: p[1], l: p[2] },
                    RuleKind::Jacobi { beta: f64::from_bits(p[1]) },
                ),
                2 => (
                    RuleKey::Reweighted { n: p[0] as usize, l: p[1], alpha: p[2], tau: p[3] },
                    RuleKind::Reweighted {
                        l: f64::from_bits(p[1]),
                        alpha: f64::from_bits(p[2]),
                        tau: f64::from_bits(p[3]),
                    },
                ),
                _ => return Err(bad()),
            };
            let interval = (
                f64::from_bits(read_u64(&mut pos)?),
                f64::from_bits(read_u64(&mut pos)?),
            );
            let len = read_u64(&mut pos)? as usize;
            let mut nodes = Vec::with_capacity(len);
            let mut nodes_lo = Vec::with_capacity(len);
            let mut weights = Vec::with_capacity(len);
            for _ in 0..len {
                nodes.push(f64::from_bits(read_u64(&mut pos)?));
            }
            for _ in 0..len {
                nodes_lo.push(f64::from_bits(read_u64(&mut pos)?));
            }
            for _ in 0..len {
                weights.push(f64::from_bits(read_u64(&mut pos)?));
            }
            map.insert(key, Arc::new(QuadratureRule { nodes, nodes_lo, weights, interval, kind }));
        }
        Ok(())
    }
}
