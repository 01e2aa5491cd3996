//! Per-draw outage decisions for DoQF, decode-and-forward and the cut-set bound, and a
//! chunked parallel estimator whose output does not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::RelayChannels;
use crate::error::{invalid, Error, Result};
use crate::gain::{xi_cs_hd, xi_df, ProtocolParams};

/// Samples per chunk. Chunk `k` always draws from stream `k` of the seeded generator.
pub const CHUNK: u64 = 1 << 16;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Doqf,
    Df,
    Cutset,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Doqf, Protocol::Df, Protocol::Cutset];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Doqf => "doqf",
            Protocol::Df => "df",
            Protocol::Cutset => "cutset",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "doqf" => Ok(Protocol::Doqf),
            "df" => Ok(Protocol::Df),
            "cutset" | "cut-set" => Ok(Protocol::Cutset),
            other => Err(invalid(format!("unknown protocol {other:?} (expected doqf, df or cutset)"))),
        }
    }
}

/// Which part of the decision tree produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The relay decoded and forwards.
    Decoded = 0,
    /// Quantization index recovered at the destination.
    Forwarded = 1,
    /// Quantized, but the destination could not recover the index.
    Unrecovered = 2,
    /// Quantization infeasible, relay silent.
    Silent = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub outage: bool,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ProtocolParams,
    pub channels: RelayChannels,
    /// Linear SNR.
    pub snr: f64,
    /// The quantizer distortion decays as `snr^-delta_exponent`.
    pub delta_exponent: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Midpoint of the admissible distortion exponents `(0, t1/t0)`.
    pub fn default_delta(t0: f64) -> f64 {
        (1.0 - t0) / (2.0 * t0)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(invalid(format!("snr must be finite and > 0, got {}", self.snr)));
        }
        let upper = self.params.t1() / self.params.t0;
        if !(self.delta_exponent > 0.0 && self.delta_exponent < upper) {
            return Err(invalid(format!(
                "distortion exponent must lie in (0, {upper}), got {}",
                self.delta_exponent
            )));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples must be >= 1"));
        }
        Ok(())
    }

    pub fn with_snr(&self, snr: f64) -> Self {
        Self { snr, ..*self }
    }
}

/// Quantities of the decision tree that depend only on the configuration.
#[derive(Debug, Clone, Copy)]
struct Tree {
    t0: f64,
    t1: f64,
    rate: f64,
    /// `alpha0 * rho`
    src: f64,
    /// `phi = alpha1 * rho`
    relay: f64,
    /// `Delta^2`
    dist: f64,
    /// `Q * t0` with `Q = log(K / Delta^2)`, `K = e^{R/t0}`
    index_rate: f64,
}

impl Tree {
    fn new(cfg: &SimConfig) -> Self {
        let p = &cfg.params;
        let dist = cfg.snr.powf(-cfg.delta_exponent);
        Self {
            t0: p.t0,
            t1: p.t1(),
            rate: p.rate,
            src: p.alpha0 * cfg.snr,
            relay: p.alpha1 * cfg.snr,
            dist,
            index_rate: p.t0 * (p.rate / p.t0 - dist.ln()),
        }
    }

    #[inline]
    fn decodes(&self, g01: f64) -> bool {
        self.t0 * (self.src * g01).ln_1p() > self.rate
    }

    #[inline]
    fn miso_outage(&self, g02: f64, g12: f64) -> bool {
        let d = self.src * g02;
        self.t0 * d.ln_1p() + self.t1 * (d + self.relay * g12).ln_1p() <= self.rate
    }

    #[inline]
    fn doqf(&self, g01: f64, g02: f64, g12: f64) -> Decision {
        if self.decodes(g01) {
            return Decision { outage: self.miso_outage(g02, g12), branch: Branch::Decoded };
        }
        let d = self.src * g02;
        let r = self.src * g01;
        if r + 1.0 <= self.dist {
            return Decision { outage: d.ln_1p() <= self.rate, branch: Branch::Silent };
        }
        let recovered = self.t1 * (self.relay * g12 / (d + 1.0)).ln_1p() > self.index_rate;
        if !recovered {
            return Decision { outage: self.t0 * d.ln_1p() <= self.rate, branch: Branch::Unrecovered };
        }
        let ratio = (1.0 + r - self.dist) / (1.0 + r);
        let gamma = ratio * ratio;
        let combined = d + gamma * r / (gamma + self.dist * gamma.sqrt());
        Decision {
            outage: self.t1 * d.ln_1p() + self.t0 * combined.ln_1p() <= self.rate,
            branch: Branch::Forwarded,
        }
    }

    #[inline]
    fn df(&self, g01: f64, g02: f64, g12: f64) -> Decision {
        if self.decodes(g01) {
            Decision { outage: self.miso_outage(g02, g12), branch: Branch::Decoded }
        } else {
            Decision { outage: (self.src * g02).ln_1p() <= self.rate, branch: Branch::Silent }
        }
    }

    #[inline]
    fn cutset(&self, g01: f64, g02: f64, g12: f64) -> bool {
        let d = self.src * g02;
        let simo = self.t0 * (self.src * (g01 + g02)).ln_1p() + self.t1 * d.ln_1p();
        let miso = self.t0 * d.ln_1p() + self.t1 * (d + self.relay * g12).ln_1p();
        simo.min(miso) <= self.rate
    }

    #[inline]
    fn decide(&self, protocol: Protocol, g: [f64; 3]) -> Decision {
        let [g01, g02, g12] = g;
        match protocol {
            Protocol::Doqf => self.doqf(g01, g02, g12),
            Protocol::Df => self.df(g01, g02, g12),
            Protocol::Cutset => {
                // Cut-set outages are filed under whether the relay would have decoded.
                let branch = if self.decodes(g01) { Branch::Decoded } else { Branch::Silent };
                Decision { outage: self.cutset(g01, g02, g12), branch }
            }
        }
    }
}

pub fn doqf_outage_event(g01: f64, g02: f64, g12: f64, cfg: &SimConfig) -> Decision {
    Tree::new(cfg).doqf(g01, g02, g12)
}

pub fn df_outage_event(g01: f64, g02: f64, g12: f64, cfg: &SimConfig) -> Decision {
    Tree::new(cfg).df(g01, g02, g12)
}

pub fn cutset_outage_event(g01: f64, g02: f64, g12: f64, cfg: &SimConfig) -> bool {
    Tree::new(cfg).cutset(g01, g02, g12)
}

/// Occupancy of the decision-tree events over all draws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventCounts {
    /// `E`: the relay decodes.
    pub decoded: u64,
    /// `not E and S`: the relay quantizes.
    pub quantized: u64,
    /// `not E and S and F`: the destination recovers the quantization index.
    pub recovered: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    outages: u64,
    branch_outages: [u64; 4],
    events: EventCounts,
}

impl Tally {
    #[inline]
    fn record(&mut self, d: Decision) {
        match d.branch {
            Branch::Decoded => self.events.decoded += 1,
            Branch::Forwarded => {
                self.events.quantized += 1;
                self.events.recovered += 1;
            }
            Branch::Unrecovered => self.events.quantized += 1,
            Branch::Silent => {}
        }
        if d.outage {
            self.outages += 1;
            self.branch_outages[d.branch as usize] += 1;
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.outages += o.outages;
        for i in 0..4 {
            self.branch_outages[i] += o.branch_outages[i];
        }
        self.events.decoded += o.events.decoded;
        self.events.quantized += o.events.quantized;
        self.events.recovered += o.events.recovered;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationEstimate {
    pub n_samples: u64,
    pub outages: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Outages per branch in the order decoded, forwarded, unrecovered, silent.
    pub branch_outages: [u64; 4],
    pub events: EventCounts,
}

impl SimulationEstimate {
    fn from_tally(t: &Tally, n: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(t.outages, n, Z95);
        Self {
            n_samples: n,
            outages: t.outages,
            p_hat: t.outages as f64 / n as f64,
            ci_low,
            ci_high,
            branch_outages: t.branch_outages,
            events: t.events,
        }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Runs `per_draw` over `n` draws split in fixed chunks and folds the chunk results in
/// chunk order.
fn run_chunks<T, F>(cfg: &SimConfig, per_draw: F) -> T
where
    T: Default + Send + Merge,
    F: Fn(&mut T, [f64; 3]) + Sync,
{
    let n = cfg.n_samples;
    let n_chunks = n.div_ceil(CHUNK);
    let parts: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(cfg.seed, k);
            let len = CHUNK.min(n - k * CHUNK);
            let mut acc = T::default();
            for _ in 0..len {
                per_draw(&mut acc, cfg.channels.sample(&mut rng));
            }
            acc
        })
        .collect();
    let mut total = T::default();
    for p in &parts {
        total.merge_from(p);
    }
    total
}

trait Merge {
    fn merge_from(&mut self, other: &Self);
}

impl Merge for Tally {
    fn merge_from(&mut self, other: &Self) {
        self.merge(other)
    }
}

/// Generator for chunk `k`: the seeded ChaCha8 key with stream id `k`.
pub fn chunk_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

pub fn estimate_outage(cfg: &SimConfig, protocol: Protocol) -> Result<SimulationEstimate> {
    cfg.validate()?;
    let tree = Tree::new(cfg);
    let t: Tally = run_chunks(cfg, |acc: &mut Tally, g| acc.record(tree.decide(protocol, g)));
    Ok(SimulationEstimate::from_tally(&t, cfg.n_samples))
}

/// All three protocols evaluated on the same draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedEstimate {
    pub doqf: SimulationEstimate,
    pub df: SimulationEstimate,
    pub cutset: SimulationEstimate,
    /// Draws in outage for the cut-set bound but not for DoQF.
    pub cutset_not_doqf: u64,
    /// Draws in outage for DoQF but not for DF.
    pub doqf_not_df: u64,
}

#[derive(Default)]
struct PairedTally {
    t: [Tally; 3],
    cutset_not_doqf: u64,
    doqf_not_df: u64,
}

impl Merge for PairedTally {
    fn merge_from(&mut self, o: &Self) {
        for i in 0..3 {
            self.t[i].merge(&o.t[i]);
        }
        self.cutset_not_doqf += o.cutset_not_doqf;
        self.doqf_not_df += o.doqf_not_df;
    }
}

pub fn estimate_paired(cfg: &SimConfig) -> Result<PairedEstimate> {
    cfg.validate()?;
    let tree = Tree::new(cfg);
    let t: PairedTally = run_chunks(cfg, |acc: &mut PairedTally, g| {
        let q = tree.decide(Protocol::Doqf, g);
        let d = tree.decide(Protocol::Df, g);
        let c = tree.decide(Protocol::Cutset, g);
        acc.t[0].record(q);
        acc.t[1].record(d);
        acc.t[2].record(c);
        acc.cutset_not_doqf += (c.outage && !q.outage) as u64;
        acc.doqf_not_df += (q.outage && !d.outage) as u64;
    });
    let n = cfg.n_samples;
    Ok(PairedEstimate {
        doqf: SimulationEstimate::from_tally(&t.t[0], n),
        df: SimulationEstimate::from_tally(&t.t[1], n),
        cutset: SimulationEstimate::from_tally(&t.t[2], n),
        cutset_not_doqf: t.cutset_not_doqf,
        doqf_not_df: t.doqf_not_df,
    })
}

/// High-SNR outage gain that `rho^2 * p_hat` should approach.
pub fn reference_gain(cfg: &SimConfig, protocol: Protocol) -> f64 {
    let c = cfg.channels.densities();
    match protocol {
        Protocol::Doqf | Protocol::Cutset => xi_cs_hd(&cfg.params, &c).xi,
        Protocol::Df => xi_df(&cfg.params, &c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub protocol: Protocol,
    pub estimate: SimulationEstimate,
    pub rho2_phat: f64,
    pub xi_ref: f64,
}

pub fn snr_sweep(cfg: &SimConfig, protocol: Protocol, snr_db: &[f64]) -> Result<Vec<SweepPoint>> {
    if snr_db.is_empty() {
        return Err(invalid("SNR list is empty"));
    }
    snr_db
        .iter()
        .map(|&db| {
            let rho = crate::db_to_linear(db);
            let c = cfg.with_snr(rho);
            let estimate = estimate_outage(&c, protocol)?;
            Ok(SweepPoint {
                snr_db: db,
                protocol,
                estimate,
                rho2_phat: rho * rho * estimate.p_hat,
                xi_ref: reference_gain(&c, protocol),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Fading, NetworkGeometry};
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn section_cfg(snr: f64, n: u64) -> SimConfig {
        SimConfig {
            params: ProtocolParams::new(0.5, 0.5, 1.0, 2.0 * LN2).unwrap(),
            channels: NetworkGeometry::default_line().channels(Fading::Rayleigh).unwrap(),
            snr,
            delta_exponent: 0.5,
            n_samples: n,
            seed: 42,
        }
    }

    fn small_cfg(snr: f64) -> SimConfig {
        SimConfig {
            params: ProtocolParams::new(0.5, 0.5, 0.5, 2.0 * LN2).unwrap(),
            snr,
            ..section_cfg(snr, 1)
        }
    }

    #[test]
    fn saturated_channels() {
        let cfg = SimConfig { params: ProtocolParams::new(0.5, 0.5, 0.5, 4f64.ln()).unwrap(), ..small_cfg(10.0) };
        let d = doqf_outage_event(1e9, 1e9, 1e9, &cfg);
        assert_eq!(d, Decision { outage: false, branch: Branch::Decoded });
        assert!(!df_outage_event(1e9, 1e9, 1e9, &cfg).outage);
        assert!(!cutset_outage_event(1e9, 1e9, 1e9, &cfg));
    }

    #[test]
    fn dead_channels() {
        let cfg = small_cfg(10.0);
        let d = doqf_outage_event(0.0, 0.0, 0.0, &cfg);
        assert_eq!(d, Decision { outage: true, branch: Branch::Unrecovered });
    }

    #[test]
    fn hand_walkthrough() {
        // rho = 100, alpha0 = alpha1 = 0.5, t0 = 0.5, R = 2 ln 2, distortion exponent 0.5.
        let cfg = small_cfg(100.0);
        let (t0, t1, rate) = (0.5f64, 0.5f64, 2.0 * LN2);
        let (g01, g02, g12) = (0.02f64, 0.05f64, 2.0f64);
        let src = 0.5 * 100.0;
        let phi = 0.5 * 100.0;
        let dist = 0.1f64; // 100^-0.5
        assert!(t0 * (1.0 + src * g01).ln() <= rate); // 0.5 ln 2 < 2 ln 2: relay fails
        assert!(src * g01 + 1.0 > dist); // quantization feasible
        let q_t0 = t0 * ((rate / t0).exp() / dist).ln(); // 0.5 ln 160
        let f = t1 * (1.0 + phi * g12 / (src * g02 + 1.0)).ln(); // 0.5 ln(1 + 100/3.5)
        assert!(f <= q_t0); // index not recovered
        assert!(t0 * (1.0 + src * g02).ln() <= rate); // 0.5 ln 3.5
        let d = doqf_outage_event(g01, g02, g12, &cfg);
        assert_eq!(d, Decision { outage: true, branch: Branch::Unrecovered });
    }

    #[test]
    fn forwarded_branch_rescues_draw() {
        // Strong relay-destination link: the index goes through and the combined
        // signal clears the rate while the direct link alone does not.
        let cfg = small_cfg(100.0);
        let (g01, g02, g12) = (0.2, 0.02, 50.0);
        let q = doqf_outage_event(g01, g02, g12, &cfg);
        assert_eq!(q.branch, Branch::Forwarded);
        assert!(!q.outage);
        let d = df_outage_event(g01, g02, g12, &cfg);
        assert_eq!(d, Decision { outage: true, branch: Branch::Silent });
    }

    #[test]
    fn silent_branch() {
        // Distortion above 1 + alpha0 rho g01 only happens for a negative exponent-like
        // setting; use a tiny SNR to push Delta^2 above one.
        let mut cfg = small_cfg(0.5);
        cfg.delta_exponent = 0.9;
        let d = doqf_outage_event(0.0, 1.0, 1.0, &cfg);
        assert_eq!(d.branch, Branch::Silent);
        assert_eq!(d.outage, (1.0f64 + 0.25).ln() <= 2.0 * LN2);
    }

    #[test]
    fn cutset_without_relay_links() {
        let cfg = small_cfg(100.0);
        for g02 in [0.01, 0.05, 0.1, 0.3, 1.0] {
            let direct = (1.0f64 + 50.0 * g02).ln() <= 2.0 * LN2;
            assert_eq!(cutset_outage_event(0.0, g02, 0.0, &cfg), direct);
        }
    }

    #[test]
    fn zero_rate_never_outage() {
        let mut cfg = section_cfg(100.0, 100_000);
        cfg.params.rate = 0.0;
        for p in Protocol::ALL {
            assert_eq!(estimate_outage(&cfg, p).unwrap().outages, 0);
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = section_cfg(100.0, 10);
        cfg.delta_exponent = 1.0;
        assert!(estimate_outage(&cfg, Protocol::Doqf).is_err());
        cfg.delta_exponent = 0.0;
        assert!(estimate_outage(&cfg, Protocol::Doqf).is_err());
        let cfg = SimConfig { n_samples: 0, ..section_cfg(100.0, 10) };
        assert!(estimate_outage(&cfg, Protocol::Doqf).is_err());
        let cfg = SimConfig { snr: 0.0, ..section_cfg(100.0, 10) };
        assert!(estimate_outage(&cfg, Protocol::Doqf).is_err());
        assert!(snr_sweep(&section_cfg(100.0, 10), Protocol::Df, &[]).is_err());
    }

    #[test]
    fn estimate_bookkeeping() {
        let cfg = section_cfg(100.0, 300_000);
        for p in Protocol::ALL {
            let e = estimate_outage(&cfg, p).unwrap();
            assert_eq!(e.branch_outages.iter().sum::<u64>(), e.outages);
            assert_eq!(e.p_hat * e.n_samples as f64, e.outages as f64);
            assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
        }
    }

    #[test]
    fn paired_matches_single_protocol_runs() {
        let cfg = section_cfg(300.0, 200_000);
        let paired = estimate_paired(&cfg).unwrap();
        assert_eq!(paired.doqf, estimate_outage(&cfg, Protocol::Doqf).unwrap());
        assert_eq!(paired.df, estimate_outage(&cfg, Protocol::Df).unwrap());
        assert_eq!(paired.cutset, estimate_outage(&cfg, Protocol::Cutset).unwrap());
        assert_eq!(paired.cutset_not_doqf, 0);
    }

    #[test]
    fn deterministic_across_pools() {
        let cfg = section_cfg(100.0, 5 * CHUNK + 123);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_outage(&cfg, Protocol::Doqf).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, run(8));
    }

    #[test]
    fn ci_width_shrinks_with_samples() {
        let a = estimate_outage(&section_cfg(10.0, 400_000), Protocol::Doqf).unwrap();
        let b = estimate_outage(&section_cfg(10.0, 800_000), Protocol::Doqf).unwrap();
        let ratio = (b.ci_high - b.ci_low) / (a.ci_high - a.ci_low);
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn decode_failure_rate_matches_asymptote() {
        let snr = 1e3;
        let cfg = section_cfg(snr, 4_000_000);
        let e = estimate_outage(&cfg, Protocol::Doqf).unwrap();
        let p = &cfg.params;
        let c01 = cfg.channels.sr.density_at_zero();
        let expected = c01 * (p.rate / p.t0).exp_m1() / (p.alpha0 * snr);
        let observed = 1.0 - e.events.decoded as f64 / e.n_samples as f64;
        assert!(((observed - expected) / expected).abs() < 0.1, "{observed} vs {expected}");
        // Quantization is almost always feasible once the relay fails.
        let silent = e.n_samples - e.events.decoded - e.events.quantized;
        assert!((silent as f64) < 0.05 * (e.n_samples - e.events.decoded) as f64);
    }

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 1000), (1, 100_000_000)] {
            let (lo, hi) = wilson_interval(k, n, Z95);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
    }

    #[test]
    fn sweep_reference_columns() {
        let cfg = section_cfg(1.0, 10_000);
        let pts = snr_sweep(&cfg, Protocol::Df, &[10.0, 20.0]).unwrap();
        assert_eq!(pts.len(), 2);
        let c = cfg.channels.densities();
        assert_eq!(pts[0].xi_ref, xi_df(&cfg.params, &c));
        assert!((pts[1].rho2_phat - 1e4 * pts[1].estimate.p_hat).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn cutset_outage_implies_doqf_outage(
            g01 in 0.0f64..5.0, g02 in 0.0f64..5.0, g12 in 0.0f64..5.0,
            db in 0.0f64..40.0, t0 in 0.2f64..0.8, delta_frac in 0.05f64..0.95,
        ) {
            let params = ProtocolParams::new(t0, 0.5, 1.0, 2.0 * LN2).unwrap();
            let cfg = SimConfig {
                params,
                snr: crate::db_to_linear(db),
                delta_exponent: delta_frac * params.t1() / t0,
                ..section_cfg(1.0, 1)
            };
            if cutset_outage_event(g01, g02, g12, &cfg) {
                prop_assert!(doqf_outage_event(g01, g02, g12, &cfg).outage);
            }
        }

        #[test]
        fn decoded_branch_agrees_between_doqf_and_df(
            g01 in 0.0f64..5.0, g02 in 0.0f64..5.0, g12 in 0.0f64..5.0, db in 0.0f64..40.0,
        ) {
            let cfg = section_cfg(crate::db_to_linear(db), 1);
            let q = doqf_outage_event(g01, g02, g12, &cfg);
            let d = df_outage_event(g01, g02, g12, &cfg);
            prop_assert_eq!(q.branch == Branch::Decoded, d.branch == Branch::Decoded);
            if q.branch == Branch::Decoded {
                prop_assert_eq!(q, d);
            }
        }
    }
}
