//! Diversity-multiplexing tradeoff of DoQF, decode-and-forward and the MISO bound.
//!
//! `t0` is the listening fraction, `delta` the exponent of the quantizer distortion
//! `Delta^2 ~ rho^-delta`, `r` the multiplexing gain. The four terms are the
//! diversity orders of the four outage branches: relay decodes, quantization index
//! recovered, index not recovered, relay silent.

use crate::error::{invalid, Error, Result};

pub const SQRT_5: f64 = 2.236_067_977_499_789_7;
/// End of the regime where DoQF meets the MISO bound.
pub const R1: f64 = 0.25;
/// End of the regime where quantization improves on decode-and-forward.
pub const R2: f64 = 2.0 * (SQRT_5 - 1.0) / (9.0 - SQRT_5);
/// End of the regime where the optimal listening fraction is fixed.
pub const R3: f64 = (SQRT_5 - 1.0) / (SQRT_5 + 1.0);
/// Optimal decode-and-forward listening fraction below `R3`.
pub const T0_DF: f64 = 2.0 / (SQRT_5 + 1.0);

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Whether the quantizer distortion is too coarse for the quantize branches to matter.
/// At `delta == 1 - x` with `x > 0` both quantize regions are empty, so the tie goes to
/// the collapsed branch.
fn collapsed(delta: f64, x: f64) -> bool {
    if x > 0.0 {
        delta >= 1.0 - x
    } else {
        delta > 1.0
    }
}

pub fn miso_bound(r: f64) -> f64 {
    2.0 * pos(1.0 - r)
}

/// Relay decodes.
pub fn d1(t0: f64, r: f64) -> f64 {
    if t0 <= 0.5 {
        miso_bound(r)
    } else if r < 1.0 - t0 {
        2.0 - r / (1.0 - t0)
    } else {
        pos(1.0 - r) / t0
    }
}

/// Relay quantizes and the destination recovers the index.
pub fn d2(t0: f64, delta: f64, r: f64) -> f64 {
    let x = pos(1.0 - r / t0);
    if delta <= 0.0 || collapsed(delta, x) {
        return miso_bound(r);
    }
    let t1 = 1.0 - t0;
    if t0 >= 0.5 {
        let lhs = r / t1 - x - (t0 / t1) * delta;
        if lhs <= 1.0 - r {
            pos(1.0 - r) + x.max(1.0 - r - delta)
        } else {
            lhs + ((1.0 - 2.0 * r) / t0 + (t1 / t0) * x).max(x)
        }
    } else if 2.0 * t0 * t1 <= r {
        x + pos(1.0 - r).max((1.0 - r) / t1 - (t0 / t1) * x - (t0 / t1) * delta)
    } else {
        x + r / t1 - x - (t0 / t1) * delta
    }
}

/// Relay quantizes but the destination cannot recover the index.
pub fn d3(t0: f64, delta: f64, r: f64) -> f64 {
    let x = pos(1.0 - r / t0);
    if collapsed(delta, x) {
        return miso_bound(r);
    }
    let t1 = 1.0 - t0;
    2.0 * x + pos(2.0 * x + (t0 / t1) * delta - r / t1)
}

/// Quantization infeasible, relay silent.
pub fn d4(t0: f64, delta: f64, r: f64) -> f64 {
    if delta <= 0.0 {
        return miso_bound(r);
    }
    pos(1.0 - r) + pos(1.0 - r / t0).max(pos(1.0 - delta))
}

pub fn d_of(t0: f64, delta: f64, r: f64) -> f64 {
    d1(t0, r).min(d2(t0, delta, r)).min(d3(t0, delta, r)).min(d4(t0, delta, r))
}

/// `2(1+r)v^3 - (4+5r)v^2 + 2(1+4r)v - 4r`
pub fn v_star_cubic(r: f64, v: f64) -> f64 {
    ((2.0 * (1.0 + r) * v - (4.0 + 5.0 * r)) * v + 2.0 * (1.0 + 4.0 * r)) * v - 4.0 * r
}

fn v_star_cubic_prime(r: f64, v: f64) -> f64 {
    (6.0 * (1.0 + r) * v - 2.0 * (4.0 + 5.0 * r)) * v + 2.0 * (1.0 + 4.0 * r)
}

/// Root of [`v_star_cubic`] on `[1/2, T0_DF]`: bisection to `1e-6`, then Newton.
pub fn solve_v_star(r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(invalid(format!("r must be finite, got {r}")));
    }
    let (mut lo, mut hi) = (0.5, T0_DF);
    let (flo, fhi) = (v_star_cubic(r, lo), v_star_cubic(r, hi));
    // A root sitting on an endpoint can come out with either sign after rounding.
    if flo.abs() < 1e-13 {
        return Ok(lo);
    }
    if fhi.abs() < 1e-13 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let rising = flo < 0.0;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if (v_star_cubic(r, mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = v_star_cubic(r, v);
        if f.abs() < 1e-13 {
            break;
        }
        let next = v - f / v_star_cubic_prime(r, v);
        if !(next > lo && next < hi) {
            break;
        }
        if (f < 0.0) == rising {
            lo = v;
        } else {
            hi = v;
        }
        v = next;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    pub d: f64,
    pub t0: f64,
    pub delta: f64,
}

/// Optimal DoQF tradeoff with the maximizing listening fraction and distortion exponent.
pub fn dmt_doqf_star(r: f64) -> DmtPoint {
    if r <= R1 {
        DmtPoint { d: miso_bound(r), t0: 0.5, delta: 0.0 }
    } else if r <= R2 {
        let v = solve_v_star(r).expect("cubic has a root on [1/2, T0_DF] for r in (1/4, R2]");
        DmtPoint {
            d: 2.0 - r / (1.0 - v),
            t0: v,
            delta: 4.0 * r / v + 2.0 * (r + 1.0) * v - 2.0 - 5.0 * r,
        }
    } else if r <= R3 {
        DmtPoint { d: 2.0 - r / R3, t0: T0_DF, delta: r / T0_DF }
    } else {
        let t0 = 1.0 / (2.0 - r);
        DmtPoint { d: (2.0 - r) * (1.0 - r), t0, delta: r / t0 }
    }
}

/// Optimal decode-and-forward tradeoff; `delta` is unused and set to zero.
pub fn dmt_df_star(r: f64) -> DmtPoint {
    if r <= R3 {
        DmtPoint { d: 2.0 - r / R3, t0: T0_DF, delta: 0.0 }
    } else {
        DmtPoint { d: (2.0 - r) * (1.0 - r), t0: 1.0 / (2.0 - r), delta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmtProtocol {
    Doqf,
    Df,
    Miso,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmtCurve {
    pub protocol: DmtProtocol,
    /// `(r, d, t0_star, delta_star)`; the MISO bound reports `NaN` for the allocation.
    pub points: Vec<(f64, f64, f64, f64)>,
}

pub fn curve(protocol: DmtProtocol, rs: &[f64]) -> Result<DmtCurve> {
    check_grid(rs)?;
    let points = rs
        .iter()
        .map(|&r| match protocol {
            DmtProtocol::Doqf => {
                let p = dmt_doqf_star(r);
                (r, p.d, p.t0, p.delta)
            }
            DmtProtocol::Df => {
                let p = dmt_df_star(r);
                (r, p.d, p.t0, p.delta)
            }
            DmtProtocol::Miso => (r, miso_bound(r), f64::NAN, f64::NAN),
        })
        .collect();
    Ok(DmtCurve { protocol, points })
}

/// One row of the curve export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtRow {
    pub r: f64,
    pub doqf: DmtPoint,
    pub df: DmtPoint,
    pub miso: f64,
}

pub fn table(rs: &[f64]) -> Result<Vec<DmtRow>> {
    check_grid(rs)?;
    Ok(rs
        .iter()
        .map(|&r| DmtRow { r, doqf: dmt_doqf_star(r), df: dmt_df_star(r), miso: miso_bound(r) })
        .collect())
}

fn check_grid(rs: &[f64]) -> Result<()> {
    if rs.is_empty() {
        return Err(invalid("r grid is empty"));
    }
    if let Some(r) = rs.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(invalid(format!("multiplexing gain must lie in [0, 1], got {r}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn decode_term() {
        assert_abs_diff_eq!(d1(0.5, 0.3), 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(d1(0.6, 0.3), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d1(0.6, 0.5), 0.5 / 0.6, epsilon = 1e-15);
    }

    #[test]
    fn forward_term() {
        for (t0, r) in [(0.3, 0.2), (0.7, 0.5)] {
            assert_eq!(d2(t0, 0.0, r), miso_bound(r));
            assert_eq!(d2(t0, -0.4, r), miso_bound(r));
        }
        assert_abs_diff_eq!(d2(0.5, 1e-12, 0.2), 1.6, epsilon = 1e-9);
        assert_abs_diff_eq!(d2(0.5663, 0.0917, 0.3), 0.7 + (1.0 - 0.3 - 0.0917), epsilon = 1e-12);
    }

    #[test]
    fn unrecovered_term() {
        assert_abs_diff_eq!(d3(0.5, 0.0, 0.25), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d3(0.5, 0.0, 0.2), 2.0, epsilon = 1e-15);
        assert_eq!(d3(0.5, 0.9, 0.3), miso_bound(0.3));
        // Tie at delta = r/t0 with r < t0 collapses; with r >= t0 it does not.
        assert_eq!(d3(0.5, 0.6, 0.3), miso_bound(0.3));
        assert_eq!(d3(0.5, 1.0, 0.6), 0.0);
    }

    #[test]
    fn silent_term() {
        assert_abs_diff_eq!(d4(0.5, 0.3, 0.3), 1.4, epsilon = 1e-15);
        assert_eq!(d4(0.5, 0.0, 0.3), miso_bound(0.3));
        assert_abs_diff_eq!(d4(0.4, 1.0, 0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn combined() {
        assert_abs_diff_eq!(d_of(0.5, 0.0, 0.2), 1.6, epsilon = 1e-15);
        assert_abs_diff_eq!(d_of(0.5, 0.0, 0.25), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn cubic_root() {
        assert_eq!(solve_v_star(0.25).unwrap(), 0.5);
        let v = solve_v_star(0.3).unwrap();
        assert_abs_diff_eq!(v, 0.566_181_555_242_594, epsilon = 1e-12);
        assert!(v_star_cubic(0.3, v).abs() < 1e-12);
        let v = solve_v_star(R2).unwrap();
        assert_abs_diff_eq!(v, T0_DF, epsilon = 1e-9);
        assert!(matches!(solve_v_star(0.1), Err(Error::NoBracket { .. })));
        assert!(solve_v_star(0.5).is_err());
    }

    #[test]
    fn optimum_examples() {
        assert_eq!(dmt_doqf_star(0.0), DmtPoint { d: 2.0, t0: 0.5, delta: 0.0 });
        let p = dmt_doqf_star(0.3);
        assert_abs_diff_eq!(p.d, 1.308_466_471_111_5, epsilon = 1e-11);
        assert_abs_diff_eq!(p.t0, 0.566_181_555_242_6, epsilon = 1e-11);
        assert_abs_diff_eq!(p.delta, 0.091_533_528_888_5, epsilon = 1e-11);
        assert_eq!(dmt_doqf_star(R3).d, 1.0);
        assert_abs_diff_eq!(dmt_df_star(0.3).d, 2.0 - 2.618_034 * 0.3, epsilon = 1e-6);
        assert_eq!(dmt_df_star(0.0).d, 2.0);
        assert_eq!(dmt_df_star(1.0).d, 0.0);
    }

    #[test]
    fn breakpoints() {
        assert_abs_diff_eq!(R2, 0.365_488_0, epsilon = 1e-7);
        assert_abs_diff_eq!(R3, 0.381_966, epsilon = 1e-6);
        assert_abs_diff_eq!(T0_DF, 0.618_034, epsilon = 1e-6);
        assert_abs_diff_eq!(1.0 / R3, (3.0 + SQRT_5) / 2.0, epsilon = 1e-14);
        assert_eq!(SQRT_5, 5f64.sqrt());
    }

    #[test]
    fn curves() {
        let rs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        for proto in [DmtProtocol::Doqf, DmtProtocol::Df, DmtProtocol::Miso] {
            let c = curve(proto, &rs).unwrap();
            assert_eq!(c.points[0].1, 2.0);
            assert!(c.points[100].1.abs() < 1e-15);
            for w in c.points.windows(2) {
                assert!(w[1].1 <= w[0].1 + 1e-12);
            }
        }
        assert!(curve(DmtProtocol::Df, &[]).is_err());
        assert!(table(&[0.5, 1.2]).is_err());
    }

    proptest! {
        #[test]
        fn terms_nonnegative(t0 in 0.01f64..0.99, delta in -0.5f64..1.5, r in 0.0f64..1.0) {
            prop_assert!(d1(t0, r) >= 0.0);
            prop_assert!(d3(t0, delta, r) >= 0.0);
            prop_assert!(d4(t0, delta, r) >= 0.0);
            prop_assert!(d_of(t0, delta, r) <= miso_bound(r) + 1e-12);
        }

        #[test]
        fn forward_term_nonnegative_for_long_listening(t0 in 0.5f64..0.99, delta in -0.5f64..1.5, r in 0.0f64..1.0) {
            prop_assert!(d2(t0, delta, r) >= 0.0);
        }

        #[test]
        fn doqf_dominates_df(r in 0.0f64..1.0) {
            prop_assert!(dmt_doqf_star(r).d >= dmt_df_star(r).d - 1e-12);
        }

        #[test]
        fn optimum_is_attained(r in 0.0f64..0.99) {
            let p = dmt_doqf_star(r);
            prop_assert!((d_of(p.t0, p.delta, r) - p.d).abs() < 1e-8, "r={r} {p:?} d_of={}", d_of(p.t0, p.delta, r));
        }
    }
}
