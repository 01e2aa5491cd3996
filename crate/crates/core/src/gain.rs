//! High-SNR outage gains: the limit of `rho^2 * P_out(rho)` for the half-duplex
//! cut-set bound (which DoQF attains) and for decode-and-forward.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::LinkDensities;
use crate::error::{invalid, Error, Result};

/// Half-width of the band around `t = 1/2` where [`bracket`] switches to its limit.
pub const HALF_GUARD: f64 = 1e-6;

/// Slot split, power factors and target rate of a two-slot relay protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Fraction of the frame in which only the source transmits.
    pub t0: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    /// Target rate in nats per channel use.
    pub rate: f64,
}

impl ProtocolParams {
    pub fn new(t0: f64, alpha0: f64, alpha1: f64, rate: f64) -> Result<Self> {
        let p = Self { t0, alpha0, alpha1, rate };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the convexified `(t1, beta0, beta1)` coordinates.
    pub fn from_convex(t1: f64, beta0: f64, beta1: f64, rate: f64) -> Result<Self> {
        if !(t1 > 0.0 && t1 < 1.0) {
            return Err(invalid(format!("t1 must lie in (0,1), got {t1}")));
        }
        Self::new(1.0 - t1, beta0, beta1 / t1, rate)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return Err(invalid(format!("t0 must lie in (0,1), got {}", self.t0)));
        }
        for (name, a) in [("alpha0", self.alpha0), ("alpha1", self.alpha1)] {
            if !a.is_finite() || a <= 0.0 {
                return Err(invalid(format!("{name} must be finite and > 0, got {a}")));
            }
        }
        if !self.rate.is_finite() || self.rate < 0.0 {
            return Err(invalid(format!("rate must be finite and >= 0, got {}", self.rate)));
        }
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        1.0 - self.t0
    }

    pub fn beta0(&self) -> f64 {
        self.alpha0
    }

    pub fn beta1(&self) -> f64 {
        self.alpha1 * self.t1()
    }

    /// Long-term average power constraint `beta0 + beta1 <= 1`.
    pub fn power_feasible(&self) -> bool {
        self.beta0() + self.beta1() <= 1.0 + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageGain {
    pub xi: f64,
    /// Contribution of draws where the relay listens in the first slot.
    pub term_simo: f64,
    /// Contribution of draws where the relay forwards in the second slot.
    pub term_miso: f64,
}

/// `1/2 + e^{2R}/(4t-2) - t e^{R/t}/(2t-1)`, the area of the outage region
/// `{t log(1+u) + (1-t) log(1+u+v) <= R}` after the substitution to `(x, y)`.
pub fn bracket(t: f64, rate: f64) -> f64 {
    let e2r = (2.0 * rate).exp();
    if (t - 0.5).abs() <= HALF_GUARD {
        return 0.5 + e2r * (2.0 * rate - 1.0) / 2.0;
    }
    0.5 + e2r / (4.0 * t - 2.0) - t * (rate / t).exp() / (2.0 * t - 1.0)
}

/// Outage gain of the half-duplex cut-set bound, also the outage gain of DoQF.
pub fn xi_cs_hd(p: &ProtocolParams, c: &LinkDensities) -> OutageGain {
    let term_simo = c.sd * c.sr / (p.alpha0 * p.alpha0) * bracket(p.t0, p.rate);
    let term_miso = c.sd * c.rd / (p.alpha0 * p.alpha1) * bracket(p.t1(), p.rate);
    OutageGain { xi: term_simo + term_miso, term_simo, term_miso }
}

/// DoQF outage gain in the coordinates `(t1, beta0, beta1)` where it is jointly convex.
pub fn xi_doqf_convex(t1: f64, beta0: f64, beta1: f64, c: &LinkDensities, rate: f64) -> f64 {
    c.sd * c.sr / (beta0 * beta0) * bracket(1.0 - t1, rate)
        + c.sd * c.rd * t1 / (beta0 * beta1) * bracket(t1, rate)
}

/// Outage gain of decode-and-forward with the same slot split and powers.
pub fn xi_df(p: &ProtocolParams, c: &LinkDensities) -> f64 {
    let forward = c.sd * c.rd / (p.alpha0 * p.alpha1) * bracket(p.t1(), p.rate);
    let silent =
        c.sr * c.sd / (p.alpha0 * p.alpha0) * (p.rate / p.t0).exp_m1() * p.rate.exp_m1();
    forward + silent
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationMethod {
    /// Iterated quadrature with the given relative tolerance.
    Quadrature { rel_tol: f64 },
    /// Hit-or-miss sampling over the bounding box.
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionIntegral {
    pub value: f64,
    /// Estimated absolute error (one standard error for Monte Carlo).
    pub abs_error: f64,
}

/// Area of `{(u, v) >= 0 : t_a log(1+u) + t_b log(1+u+v) <= R}`.
///
/// Only the indicator itself is evaluated. The quadrature resolves the inner `v`
/// extent by bisection on the indicator, which is monotone in `v`, and integrates
/// that extent over `u` with adaptive Simpson.
pub fn region_integral(
    t_a: f64,
    t_b: f64,
    rate: f64,
    method: IntegrationMethod,
) -> Result<RegionIntegral> {
    if !(t_a > 0.0 && t_b > 0.0) || ((t_a + t_b) - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("slot fractions must be positive and sum to 1, got {t_a} + {t_b}")));
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(invalid(format!("rate must be finite and >= 0, got {rate}")));
    }
    let inside = |u: f64, v: f64| t_a * u.ln_1p() + t_b * (u + v).ln_1p() <= rate;
    let u_bound = (rate / t_a).exp_m1();
    let growth = (rate / t_b).exp_m1();
    let v_bound = |u: f64| (1.0 + u) * growth;
    let u_max = boundary(|u| inside(u, 0.0), 0.0, u_bound);
    if u_max <= 0.0 {
        return Ok(RegionIntegral { value: 0.0, abs_error: 0.0 });
    }

    match method {
        IntegrationMethod::Quadrature { rel_tol } => {
            if !(rel_tol >= 1e-13 && rel_tol < 1.0) {
                return Err(Error::Resolution(format!("relative tolerance {rel_tol} outside [1e-13, 1)")));
            }
            let extent = |u: f64| {
                if !inside(u, 0.0) {
                    0.0
                } else {
                    boundary(|v| inside(u, v), 0.0, v_bound(u))
                }
            };
            let (value, abs_error) = adaptive_simpson(&extent, 0.0, u_max, rel_tol)?;
            Ok(RegionIntegral { value, abs_error })
        }
        IntegrationMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Resolution("Monte Carlo needs at least one sample".into()));
            }
            let v_max = v_bound(u_max);
            let area = u_max * v_max;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0u64;
            for _ in 0..samples {
                let u = rng.random::<f64>() * u_max;
                let v = rng.random::<f64>() * v_max;
                hits += inside(u, v) as u64;
            }
            let p = hits as f64 / samples as f64;
            Ok(RegionIntegral {
                value: area * p,
                abs_error: area * (p * (1.0 - p) / samples as f64).sqrt(),
            })
        }
    }
}

/// Largest `x` in `[lo, hi]` with `pred(x)`, assuming `pred` holds on an initial segment.
fn boundary(pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    if !pred(lo) {
        return lo;
    }
    if pred(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const MAX_DEPTH: u32 = 48;

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // A coarse first pass fixes the absolute target so that the recursion does not chase
    // relative accuracy in the thin tail near `b`.
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    let mut err = 0.0;
    let value = simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 0, &mut err)?;
    Ok((value, err))
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        *err += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Resolution(format!(
            "adaptive quadrature hit depth {MAX_DEPTH} on [{a}, {b}]"
        )));
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, err)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, err)?;
    Ok(l + r)
}
