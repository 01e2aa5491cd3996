//! Slot and power allocation minimizing the DoQF outage gain.
//!
//! With the budget tight (`beta1 = 1 - beta0`) the objective
//! `f(t1, beta0) = xi_doqf_convex(t1, beta0, 1 - beta0)` is convex on the open unit
//! square and blows up on its frontier, so a projected descent on a slightly shrunk
//! square finds the interior minimum.

use rand::Rng;

use crate::channel::LinkDensities;
use crate::error::{invalid, Error, Result};
use crate::gain::xi_doqf_convex;

/// Iterates are clamped to `[EDGE, 1 - EDGE]` in both coordinates.
pub const EDGE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub t1_star: f64,
    pub beta0_star: f64,
    pub beta1_star: f64,
    pub xi_star: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

impl AllocationResult {
    pub fn t0_star(&self) -> f64 {
        1.0 - self.t1_star
    }

    pub fn alpha0_star(&self) -> f64 {
        self.beta0_star
    }

    pub fn alpha1_star(&self) -> f64 {
        self.beta1_star / self.t1_star
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocatorOptions {
    /// Stop once the projected gradient norm falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting `(t1, beta0)`.
    pub start: (f64, f64),
}

impl Default for AllocatorOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 5_000, start: (0.5, 0.5) }
    }
}

/// The objective in the reduced coordinates.
pub fn objective(t1: f64, beta0: f64, c: &LinkDensities, rate: f64) -> f64 {
    xi_doqf_convex(t1, beta0, 1.0 - beta0, c, rate)
}

pub fn minimize_outage_gain(c: &LinkDensities, rate: f64, tolerance: f64) -> Result<AllocationResult> {
    minimize_with(c, rate, &AllocatorOptions { tolerance, ..Default::default() })
}

/// Projected gradient descent with Barzilai-Borwein steps and a non-monotone
/// Armijo backtracking safeguard.
pub fn minimize_with(c: &LinkDensities, rate: f64, opts: &AllocatorOptions) -> Result<AllocationResult> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(invalid(format!("rate must be finite and > 0, got {rate}")));
    }
    if !(opts.tolerance > 0.0) {
        return Err(invalid("tolerance must be > 0"));
    }
    let f = |x: [f64; 2]| objective(x[0], x[1], c, rate);
    let grad = |x: [f64; 2]| gradient(&f, x);

    let mut x = [clamp(opts.start.0), clamp(opts.start.1)];
    let mut fx = f(x);
    if !fx.is_finite() {
        return Err(invalid("objective is not finite at the starting point"));
    }
    let mut g = grad(x);
    let mut step = 1.0 / norm(g).max(1.0);
    let mut recent = vec![fx];
    const MEMORY: usize = 10;

    for it in 0..opts.max_iterations {
        let pg = projected_grad_norm(x, g);
        if pg < opts.tolerance {
            return Ok(finish(x, fx, pg, it));
        }
        let reference = recent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 8.0 * f64::EPSILON * reference.abs();
        let mut t = step;
        let (xn, fxn) = loop {
            let xn = [clamp(x[0] - t * g[0]), clamp(x[1] - t * g[1])];
            let fxn = f(xn);
            let decrease = g[0] * (xn[0] - x[0]) + g[1] * (xn[1] - x[1]);
            if fxn.is_finite() && fxn <= reference + 1e-4 * decrease + slack {
                break (xn, fxn);
            }
            t *= 0.5;
            if t < 1e-30 {
                return Err(stalled(x, fx, pg, it));
            }
        };
        let gn = grad(xn);
        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [gn[0] - g[0], gn[1] - g[1]];
        let sy = s[0] * y[0] + s[1] * y[1];
        let ss = s[0] * s[0] + s[1] * s[1];
        step = if sy > 0.0 { (ss / sy).clamp(1e-12, 1e6) } else { (2.0 * t).min(1e6) };
        if ss == 0.0 {
            // Projection pinned the iterate: no further progress is possible.
            return Err(stalled(xn, fxn, projected_grad_norm(xn, gn), it + 1));
        }
        x = xn;
        fx = fxn;
        g = gn;
        recent.push(fx);
        if recent.len() > MEMORY {
            recent.remove(0);
        }
    }
    let pg = projected_grad_norm(x, g);
    Err(stalled(x, fx, pg, opts.max_iterations))
}

fn finish(x: [f64; 2], fx: f64, grad_norm: f64, iterations: usize) -> AllocationResult {
    AllocationResult {
        t1_star: x[0],
        beta0_star: x[1],
        beta1_star: 1.0 - x[1],
        xi_star: fx,
        grad_norm,
        iterations,
    }
}

fn stalled(x: [f64; 2], fx: f64, grad_norm: f64, iterations: usize) -> Error {
    Error::NoConvergence { iterations, grad_norm, t1: x[0], beta0: x[1], value: fx }
}

fn clamp(v: f64) -> f64 {
    v.clamp(EDGE, 1.0 - EDGE)
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn projected_grad_norm(x: [f64; 2], g: [f64; 2]) -> f64 {
    norm([x[0] - clamp(x[0] - g[0]), x[1] - clamp(x[1] - g[1])])
}

/// Fourth-order central differences, with the step shrunk near the frontier.
fn gradient(f: &impl Fn([f64; 2]) -> f64, x: [f64; 2]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for i in 0..2 {
        let h = 1e-4f64.min(0.2 * x[i]).min(0.2 * (1.0 - x[i]));
        let at = |d: f64| {
            let mut y = x;
            y[i] += d;
            f(y)
        };
        g[i] = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub pairs: usize,
    /// Largest `f(mid) - (f(P) + f(Q)) / 2` seen.
    pub max_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityViolation {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub excess: f64,
}

/// Checks `f((P+Q)/2) <= (f(P) + f(Q))/2 + 1e-9` on random pairs in `[1e-3, 1-1e-3]^2`.
pub fn midpoint_convexity_check<R: Rng + ?Sized>(
    c: &LinkDensities,
    rate: f64,
    n_pairs: usize,
    rng: &mut R,
) -> std::result::Result<ConvexityReport, ConvexityViolation> {
    let mut draw = || (rng.random_range(1e-3..1.0 - 1e-3), rng.random_range(1e-3..1.0 - 1e-3));
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        pairs.push((draw(), draw()));
    }
    check_pairs(c, rate, &pairs)
}

/// Midpoint convexity on explicit pairs of `(t1, beta0)` points.
pub fn check_pairs(
    c: &LinkDensities,
    rate: f64,
    pairs: &[((f64, f64), (f64, f64))],
) -> std::result::Result<ConvexityReport, ConvexityViolation> {
    let f = |p: (f64, f64)| objective(p.0, p.1, c, rate);
    let mut max_excess = f64::NEG_INFINITY;
    for &(p, q) in pairs {
        let mid = (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
        let chord = 0.5 * (f(p) + f(q));
        let excess = f(mid) - chord;
        if excess.is_nan() || excess > 1e-9 {
            return Err(ConvexityViolation { p, q, excess });
        }
        max_excess = max_excess.max(excess);
    }
    Ok(ConvexityReport { pairs: pairs.len(), max_excess })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NetworkGeometry;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    fn grid_min(c: &LinkDensities, rate: f64, n: usize) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let t1 = (i as f64 + 0.5) / n as f64;
                let b0 = (j as f64 + 0.5) / n as f64;
                best = best.min(objective(t1, b0, c, rate));
            }
        }
        best
    }

    fn segment_densities(d_sr: f64) -> LinkDensities {
        NetworkGeometry::on_segment(d_sr, 3.0)
            .unwrap()
            .channels(crate::channel::Fading::Rayleigh)
            .unwrap()
            .densities()
    }

    #[test]
    fn symmetric_channels_beat_reference_point() {
        let c = LinkDensities::new(0.5, 2.0, 0.5).unwrap();
        let a = minimize_outage_gain(&c, LN2, 1e-8).unwrap();
        assert!(a.xi_star <= objective(0.5, 2.0 / 3.0, &c, LN2));
        let g = grid_min(&c, LN2, 200);
        assert!(((a.xi_star - g) / g).abs() < 1e-4, "{} vs grid {}", a.xi_star, g);
    }

    #[test]
    fn optimum_is_interior_and_budget_tight() {
        let c = segment_densities(2.0 / 3.0);
        let a = minimize_outage_gain(&c, 2.0 * LN2, 1e-8).unwrap();
        assert!(a.t1_star > EDGE && a.t1_star < 1.0 - EDGE);
        assert!(a.beta0_star > EDGE && a.beta0_star < 1.0 - EDGE);
        assert_eq!(a.beta0_star + a.beta1_star, 1.0);
        assert!(a.grad_norm < 1e-8);
        assert!(a.xi_star < objective(0.5, 0.5, &c, 2.0 * LN2));
    }

    #[test]
    fn reports_best_iterate_when_budget_exhausted() {
        let c = segment_densities(0.5);
        let opts = AllocatorOptions { max_iterations: 1, start: (0.1, 0.9), ..Default::default() };
        match minimize_with(&c, LN2, &opts) {
            Err(Error::NoConvergence { iterations, value, .. }) => {
                assert_eq!(iterations, 1);
                assert!(value.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_rate() {
        assert!(minimize_outage_gain(&LinkDensities::unit(), 0.0, 1e-8).is_err());
    }

    #[test]
    fn convexity_unit_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = midpoint_convexity_check(&LinkDensities::unit(), LN2, 1000, &mut rng).unwrap();
        assert_eq!(rep.pairs, 1000);
    }

    #[test]
    fn convexity_degenerate_and_frontier_pairs() {
        let c = LinkDensities::unit();
        let rep = check_pairs(&c, LN2, &[((0.3, 0.6), (0.3, 0.6))]).unwrap();
        assert!(rep.max_excess.abs() < 1e-12);
        check_pairs(&c, LN2, &[((0.999, 0.5), (0.9, 0.4)), ((0.999, 0.2), (0.2, 0.999))]).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn start_point_does_not_matter(t in 0.05f64..0.95, b in 0.05f64..0.95) {
            let c = segment_densities(0.6);
            let rate = 2.0 * LN2;
            let base = minimize_outage_gain(&c, rate, 1e-8).unwrap();
            let opts = AllocatorOptions { start: (t, b), ..Default::default() };
            let other = minimize_with(&c, rate, &opts).unwrap();
            prop_assert!((base.t1_star - other.t1_star).abs() < 1e-5);
            prop_assert!((base.beta0_star - other.beta0_star).abs() < 1e-5);
            prop_assert!(((base.xi_star - other.xi_star) / base.xi_star).abs() < 1e-9);
        }

        #[test]
        fn scaling_relay_links_keeps_argmin(lambda in 0.1f64..10.0) {
            let c = LinkDensities::new(0.4, 1.0, 0.05).unwrap();
            let s = LinkDensities::new(0.4 * lambda, 1.0, 0.05 * lambda).unwrap();
            let a = minimize_outage_gain(&c, LN2, 1e-8).unwrap();
            let b = minimize_outage_gain(&s, LN2, 1e-8 * lambda).unwrap();
            prop_assert!((a.t1_star - b.t1_star).abs() < 1e-5);
            prop_assert!((a.beta0_star - b.beta0_star).abs() < 1e-5);
            prop_assert!(((b.xi_star / lambda - a.xi_star) / a.xi_star).abs() < 1e-9);
        }

        #[test]
        fn source_destination_density_scales_gain(k in 0.1f64..10.0) {
            let c = LinkDensities::new(0.4, 1.0, 0.05).unwrap();
            let s = LinkDensities::new(0.4, k, 0.05).unwrap();
            let a = minimize_outage_gain(&c, LN2, 1e-8).unwrap();
            let b = minimize_outage_gain(&s, LN2, 1e-8 * k).unwrap();
            prop_assert!(((b.xi_star / k - a.xi_star) / a.xi_star).abs() < 1e-9);
        }
    }
}
