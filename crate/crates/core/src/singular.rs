//! Near-origin integrals of f(z) exp(-z^{2 alpha} tau) over [0, L].
//!
//! The weight is not smooth at z = 0 (its derivative blows up for
//! alpha < 1/2), so plain Gauss quadrature stalls. Two remedies are used:
//! for small tau the weight is Taylor-expanded so each term becomes a
//! Gauss-Jacobi moment of f; for tau > 1 (where the expansion needs too many
//! terms) the nodes are frozen and the weights are re-solved to integrate the
//! exact weight function. The expansion order K per tau regime is chosen so
//! the first omitted term falls below machine precision.

use crate::error::{Error, Result};
use crate::quadrature::RuleCache;

/// Regime thresholds and expansion orders for the dispatch.
#[derive(Debug, Clone)]
pub struct SingularConfig {
    pub n: usize,
    pub k1: u32,
    pub k2: u32,
    pub k3: u32,
    pub k4: u32,
    pub tau_thresholds: [f64; 4],
}

impl Default for SingularConfig {
    fn default() -> Self {
        SingularConfig {
            n: 16,
            k1: 17,
            k2: 9,
            k3: 6,
            k4: 4,
            tau_thresholds: [1e-3, 1e-2, 1e-1, 1.0],
        }
    }
}

/// Expansion order for the given tau regime (tau <= 1 only).
pub fn select_expansion_order(tau: f64, config: &SingularConfig) -> Result<u32> {
    if !(tau > 0.0) {
        return Err(Error::Argument(format!("tau = {tau} must be > 0")));
    }
    let [t4, t3, t2, t1] = config.tau_thresholds;
    if tau <= t4 {
        Ok(config.k4)
    } else if tau <= t3 {
        Ok(config.k3)
    } else if tau <= t2 {
        Ok(config.k2)
    } else if tau <= t1 {
        Ok(config.k1)
    } else {
        Err(Error::Branch(format!(
            "tau = {tau} > 1 is outside the expansion regime; use re-weighting"
        )))
    }
}

/// Expansion technique: sum over kappa of (-tau)^kappa / kappa! times the
/// Gauss-Jacobi moment of f against z^{2 alpha kappa}.
pub fn integrate_expansion<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    alpha: f64,
    tau: f64,
    k: u32,
    cache: &RuleCache,
) -> Result<f64> {
    let mut acc = 0.0;
    let mut coeff = 1.0; // (-tau)^kappa / kappa!
    for kappa in 0..=k {
        let beta = 2.0 * alpha * kappa as f64;
        let rule = cache.jacobi(16, beta, l)?;
        acc += coeff * rule.apply(&f);
        coeff *= -tau / (kappa + 1) as f64;
    }
    Ok(acc)
}

/// Algorithm dispatch: re-weighting for tau > 1 or when the rule is already
/// cached, expansion otherwise.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    alpha: f64,
    tau: f64,
    config: &SingularConfig,
    cache: &RuleCache,
) -> Result<f64> {
    if tau > 1.0 || cache.has_reweighted(config.n, l, alpha, tau) {
        let rule = cache.reweighted(config.n, l, alpha, tau)?;
        Ok(rule.apply(&f))
    } else {
        let k = select_expansion_order(tau, config)?;
        integrate_expansion(f, l, alpha, tau, k, cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{reference_singular_integral, reweighted_rule};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn order_ladder() {
        let cfg = SingularConfig::default();
        assert_eq!(select_expansion_order(1e-3, &cfg).unwrap(), 4);
        assert_eq!(select_expansion_order(1e-2, &cfg).unwrap(), 6);
        assert_eq!(select_expansion_order(1e-1, &cfg).unwrap(), 9);
        assert_eq!(select_expansion_order(0.5, &cfg).unwrap(), 17);
        assert_eq!(select_expansion_order(1.0, &cfg).unwrap(), 17);
        assert!(select_expansion_order(1.0 + 1e-12, &cfg).is_err());
        assert!(select_expansion_order(0.0, &cfg).is_err());
    }

    #[test]
    fn expansion_alpha_half_closed_forms() {
        let cache = RuleCache::new();
        // closed forms evaluated as series in tau; the textbook expressions
        // (1 - e^-tau)/tau etc. cancel catastrophically at tau = 1e-3
        let tau = 1e-3f64;
        let got = integrate_expansion(|_| 1.0, 1.0, 0.5, tau, 4, &cache).unwrap();
        let want = -(-tau).exp_m1() / tau;
        assert!(rel(got, want) < 1e-14, "{got} vs {want}");
        let got = integrate_expansion(|z| z, 1.0, 0.5, tau, 4, &cache).unwrap();
        // int_0^1 z e^{-tau z} dz = sum_j (-tau)^j / (j! (j + 2))
        let mut want = 0.0;
        let mut term = 1.0;
        for j in 0..20 {
            want += term / (j + 2) as f64;
            term *= -tau / (j + 1) as f64;
        }
        assert!(rel(got, want) < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn expansion_small_tau_limit() {
        let cache = RuleCache::new();
        let got = integrate_expansion(|_| 1.0, 1.0, 0.4, 1e-14, 4, &cache).unwrap();
        assert!(rel(got, 1.0) < 1e-13);
    }

    #[test]
    fn dispatch_reweighting_above_one() {
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let got = integrate_singular(|_| 1.0, 1.0, 0.5, 2.0, &cfg, &cache).unwrap();
        assert!(rel(got, 0.43233235838169365405) < 1e-12); // (1 - e^-2)/2
        assert!(cache.has_reweighted(16, 1.0, 0.5, 2.0));
    }

    #[test]
    fn cosine_example_reference() {
        // f = cos z, alpha = 0.4, tau = 0.01: frozen high-precision value of
        // the [0, 1] piece of the windowed-truncation study
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let got = integrate_singular(|z: f64| z.cos(), 1.0, 0.4, 0.01, &cfg, &cache).unwrap();
        assert!(rel(got, 0.83717520444666317339) < 1e-13, "{got}");
    }

    #[test]
    fn zero_function() {
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        assert_eq!(integrate_singular(|_| 0.0, 1.0, 0.3, 0.7, &cfg, &cache).unwrap(), 0.0);
    }

    #[test]
    fn precomputed_branch_used_below_one() {
        // once the re-weighted rule exists, tau <= 1 also goes through it and
        // must still agree with the expansion result
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let f = |z: f64| (5.0 * z).cos();
        let via_expansion = integrate_singular(f, 1.0, 0.5, 0.9, &cfg, &cache).unwrap();
        cache.reweighted(16, 1.0, 0.5, 0.9).unwrap();
        let via_rule = integrate_singular(f, 1.0, 0.5, 0.9, &cfg, &cache).unwrap();
        assert!(rel(via_rule, via_expansion) < 1e-11);
    }

    #[test]
    fn regime_consistency_near_boundary() {
        let cache = RuleCache::new();
        let f = |z: f64| (5.0 * z).cos();
        for &tau in &[0.9, 1.0, 1.1] {
            let rw = reweighted_rule(16, 1.0, 0.5, tau).unwrap().apply(f);
            if tau <= 1.0 {
                let cfg = SingularConfig::default();
                let exp = integrate_expansion(f, 1.0, 0.5, tau, cfg.k1, &cache).unwrap();
                assert!(rel(exp, rw) < 1e-11, "tau = {tau}");
            }
            let reference = reference_singular_integral(f, 1.0, 0.5, tau);
            assert!(rel(rw, reference) < 1e-11, "tau = {tau}");
        }
    }

    #[test]
    fn linearity() {
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let f = |z: f64| (3.0 * z).sin();
        let g = |z: f64| z * z - 0.25;
        let (a, b) = (2.5, -1.75);
        let lhs = integrate_singular(|z| a * f(z) + b * g(z), 1.0, 0.6, 0.3, &cfg, &cache).unwrap();
        let rhs = a * integrate_singular(f, 1.0, 0.6, 0.3, &cfg, &cache).unwrap()
            + b * integrate_singular(g, 1.0, 0.6, 0.3, &cfg, &cache).unwrap();
        assert!((lhs - rhs).abs() < 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn weight_mass_decreases_in_tau() {
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let mut prev = f64::INFINITY;
        for &tau in &[1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let v = integrate_singular(|_| 1.0, 1.0, 0.35, tau, &cfg, &cache).unwrap();
            assert!(v < prev, "tau = {tau}");
            prev = v;
        }
    }

    #[test]
    fn brute_force_equivalence_random_smooth() {
        // low-degree Chebyshev combinations with a deterministic generator
        let cache = RuleCache::new();
        let cfg = SingularConfig::default();
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for trial in 0..20 {
            let c: Vec<f64> = (0..6).map(|_| next()).collect();
            let f = |z: f64| {
                let x = 2.0 * z - 1.0;
                let mut t0 = 1.0;
                let mut t1 = x;
                let mut acc = c[0] * t0 + c[1] * t1;
                for ck in &c[2..] {
                    let t2 = 2.0 * x * t1 - t0;
                    acc += ck * t2;
                    t0 = t1;
                    t1 = t2;
                }
                acc
            };
            for &alpha in &[0.2, 0.4, 0.5, 0.7, 0.9] {
                for &tau in &[1e-3, 0.1, 1.0, 3.0, 10.0] {
                    let got = integrate_singular(&f, 1.0, alpha, tau, &cfg, &cache).unwrap();
                    let want = reference_singular_integral(&f, 1.0, alpha, tau);
                    assert!(
                        (got - want).abs() < 1e-11 * want.abs().max(1e-2),
                        "trial {trial}, alpha = {alpha}, tau = {tau}: {got} vs {want}"
                    );
                }
            }
        }
    }
}
