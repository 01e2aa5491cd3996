//! Grid check of the analytic tradeoff.
//!
//! With `G = rho^-a`, each outage branch becomes a polyhedral set of exponential
//! orders `(a01, a02, a12) >= 0` and its diversity order is the smallest
//! `a01 + a02 + a12` in that set. The sets are searched on a grid and the resulting
//! tradeoff is maximized over `(t0, delta)` by brute force.

use rayon::prelude::*;

use crate::dmt::{self, DmtPoint};
use crate::error::{invalid, Result};

/// Upper end of the order grid in each coordinate.
pub const ORDER_MAX: f64 = 2.5;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderEvent {
    /// Relay decodes, destination fails on both slots.
    Decoded,
    /// Relay quantizes and the index is recovered.
    Forwarded,
    /// Relay quantizes, index lost.
    Unrecovered,
    /// Quantization infeasible.
    Silent,
}

impl OrderEvent {
    pub const ALL: [OrderEvent; 4] =
        [OrderEvent::Decoded, OrderEvent::Forwarded, OrderEvent::Unrecovered, OrderEvent::Silent];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRegionSpec {
    pub event: OrderEvent,
    pub t0: f64,
    pub delta: f64,
    pub r: f64,
}

/// Membership of `(a01, a02, a12)` in the outage region of `spec.event`.
pub fn in_region(spec: &OrderRegionSpec, a01: f64, a02: f64, a12: f64) -> bool {
    let OrderRegionSpec { event, t0, delta, r } = *spec;
    let t1 = 1.0 - t0;
    // Excess order of the relay-destination link under the boosted relay power.
    let boost = pos(1.0 - r / t0);
    match event {
        OrderEvent::Decoded => {
            t0 * pos(1.0 - a01) > r && t0 * pos(1.0 - a02) + t1 * pos(1.0 - a02.min(a12)) < r
        }
        OrderEvent::Forwarded => {
            t1 * pos(1.0 - a02) + t0 * pos(1.0 - a02.min(a01 + pos(delta))) < r
                && pos(1.0 - a01) < r / t0
                && pos(1.0 + boost - a12 - pos(1.0 - a02)) > r / t1 - (t0 / t1) * delta
                && delta <= pos(1.0 - a01)
        }
        OrderEvent::Unrecovered => {
            t0 * pos(1.0 - a02) < r
                && pos(1.0 - a01) < r / t0
                && delta <= pos(1.0 - a01)
                && t1 * pos(1.0 + boost - a12 - pos(1.0 - a02)) <= r - t0 * delta
        }
        OrderEvent::Silent => {
            pos(1.0 - a02) < r && pos(1.0 - a01) < r / t0 && delta > pos(1.0 - a01)
        }
    }
}

/// Whether the region grows (`true`) or shrinks as `a12` increases.
fn up_closed_in_a12(event: OrderEvent) -> bool {
    !matches!(event, OrderEvent::Forwarded)
}

fn grid_len(step: f64) -> usize {
    (ORDER_MAX / step + 1e-9).floor() as usize
}

/// Smallest `a01 + a02 + a12` over the grid of `[0, ORDER_MAX]^3`; `+inf` for an empty region.
pub fn infimum_grid(spec: &OrderRegionSpec, step: f64) -> f64 {
    infimum_below(spec, step, f64::INFINITY)
}

/// [`infimum_grid`] clipped at `bound`: returns `bound` if nothing smaller exists.
///
/// For each `(a01, a02)` only the smallest feasible `a12` matters, and membership is
/// monotone in `a12`, so it is found by binary search.
pub fn infimum_below(spec: &OrderRegionSpec, step: f64, bound: f64) -> f64 {
    assert!(step > 0.0, "grid step must be positive");
    let n = grid_len(step);
    let at = |i: usize| i as f64 * step;
    let up = up_closed_in_a12(spec.event);
    let mut best = bound;
    for i in 0..=n {
        let a01 = at(i);
        if a01 >= best {
            break;
        }
        for j in 0..=n {
            let a02 = at(j);
            if a01 + a02 >= best {
                break;
            }
            let inside = |k: usize| in_region(spec, a01, a02, at(k));
            let k = if inside(0) {
                Some(0)
            } else if up && inside(n) {
                let (mut lo, mut hi) = (0, n);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if inside(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(hi)
            } else {
                None
            };
            if let Some(k) = k {
                best = best.min(a01 + a02 + at(k));
            }
        }
    }
    best
}

/// Tradeoff at `(t0, delta)` from the four grid infima.
pub fn oracle_d(t0: f64, delta: f64, r: f64, step: f64) -> f64 {
    // Start from the smallest possible upper bound so that later events prune harder.
    let mut best = f64::INFINITY;
    for event in OrderEvent::ALL {
        best = infimum_below(&OrderRegionSpec { event, t0, delta, r }, step, best);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupMode {
    /// Minimum of the four closed-form terms.
    Analytic,
    /// Minimum of the four grid infima with the given order step.
    Regions { inner_step: f64 },
}

/// Maximizes the tradeoff over the product grid `t0s x deltas`. Ties go to the longest
/// listening time, then to the smallest distortion exponent.
pub fn sup_grid(r: f64, t0s: &[f64], deltas: &[f64], mode: SupMode) -> Result<DmtPoint> {
    let points: Vec<(f64, f64)> =
        t0s.iter().flat_map(|&t| deltas.iter().map(move |&d| (t, d))).collect();
    sup_over(r, &points, mode)
}

fn sup_over(r: f64, points: &[(f64, f64)], mode: SupMode) -> Result<DmtPoint> {
    if points.is_empty() {
        return Err(invalid("empty search grid"));
    }
    if let Some(&(t, d)) = points.iter().find(|(t, d)| !(*t > 0.0 && *t < 1.0) || !(0.0..=1.0).contains(d)) {
        return Err(invalid(format!("grid point (t0={t}, delta={d}) outside (0,1) x [0,1]")));
    }
    if let SupMode::Regions { inner_step } = mode {
        if !(inner_step > 0.0 && inner_step <= 0.5) {
            return Err(invalid(format!("inner grid step must lie in (0, 0.5], got {inner_step}")));
        }
    }
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(t0, delta)| match mode {
            SupMode::Analytic => dmt::d_of(t0, delta, r),
            SupMode::Regions { inner_step } => oracle_d(t0, delta, r, inner_step),
        })
        .collect();
    let mut best = DmtPoint { d: f64::NEG_INFINITY, t0: f64::NAN, delta: f64::NAN };
    for (&(t0, delta), &d) in points.iter().zip(&values) {
        let tie = d == best.d && (t0 > best.t0 || (t0 == best.t0 && delta < best.delta));
        if d > best.d || tie {
            best = DmtPoint { d, t0, delta };
        }
    }
    Ok(best)
}

/// `k/n` for `k` in `lo..=hi`.
fn fractions(n: usize, lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|k| k as f64 / n as f64).collect()
}

/// Search for the sup of the region-based tradeoff.
///
/// A fine analytic pass locates a candidate; the region pass then evaluates a coarse
/// cover of the whole `(t0, delta)` square plus a neighbourhood of that candidate,
/// and finally polishes around its own best point.
pub fn oracle_sup(r: f64, inner_step: f64) -> Result<DmtPoint> {
    let fast = sup_grid(r, &fractions(400, 1, 399), &fractions(400, 0, 400), SupMode::Analytic)?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &t in &fractions(20, 1, 19) {
        for &d in &fractions(10, 0, 10) {
            points.push((t, d));
        }
    }
    points.extend(neighbourhood(fast.t0, fast.delta, 200.0, 3));
    let mode = SupMode::Regions { inner_step };
    let coarse = sup_over(r, &points, mode)?;
    let fine = sup_over(r, &neighbourhood(coarse.t0, coarse.delta, 400.0, 2), mode)?;
    Ok(if fine.d > coarse.d { fine } else { coarse })
}

fn neighbourhood(t0: f64, delta: f64, n: f64, k: i32) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let t = ((t0 * n).round() + i as f64) / n;
            let d = ((delta * n).round() + j as f64) / n;
            if t > 0.0 && t < 1.0 && (0.0..=1.0).contains(&d) {
                out.push((t, d));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyRow {
    pub r: f64,
    pub d_analytic: f64,
    pub d_oracle: f64,
    pub abs_error: f64,
    pub t0_star_analytic: f64,
    pub t0_best_oracle: f64,
}

/// Compares the closed-form optimum with the region-based sup at each `r`.
pub fn verify(rs: &[f64], inner_step: f64) -> Result<Vec<VerifyRow>> {
    if rs.is_empty() {
        return Err(invalid("r grid is empty"));
    }
    rs.iter()
        .map(|&r| {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid(format!("multiplexing gain must lie in [0, 1], got {r}")));
            }
            let a = dmt::dmt_doqf_star(r);
            let o = oracle_sup(r, inner_step)?;
            Ok(VerifyRow {
                r,
                d_analytic: a.d,
                d_oracle: o.d,
                abs_error: (o.d - a.d).abs(),
                t0_star_analytic: a.t0,
                t0_best_oracle: o.t0,
            })
        })
        .collect()
}
