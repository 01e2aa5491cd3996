//! Parameter resolution: command-line flag, then config file entry, then default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use doqf::channel::{Fading, NetworkGeometry};
use doqf::montecarlo::{Protocol, SimConfig};

use crate::cli::{Command, Options};

/// Every key accepted in a config file. Flags use the same names with dashes.
pub const KEYS: &[&str] = &[
    "rate_bits",
    "t0",
    "alpha0",
    "alpha1",
    "beta0",
    "beta1",
    "geometry",
    "exponent",
    "channel",
    "rice_mean",
    "snr_db",
    "samples",
    "seed",
    "delta_exp",
    "protocol",
    "r_grid",
    "grid_step",
    "out",
];

/// Largest number of points a range flag may expand to.
const MAX_RANGE_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Parses flat `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key {:?}", i + 1, k.trim())));
        }
        let value = v.trim();
        if value.is_empty() {
            return Err(usage(format!("config line {}: empty value for {key}", i + 1)));
        }
        if map.insert(key.clone(), value.to_string()).is_some() {
            return Err(usage(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(map)
}

/// Raw string values after merging flags over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn merge(flags: &Options, file: BTreeMap<String, String>) -> Self {
        let mut map = file;
        for (k, v) in flags.pairs() {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Settings(map)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError> {
        self.raw(key)
            .map(|s| s.parse::<T>().map_err(|_| usage(format!("{key}: cannot parse {s:?}"))))
            .transpose()
    }

    fn float(&self, key: &str) -> Result<Option<f64>, UsageError> {
        match self.get::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(usage(format!("{key}: must be finite, got {v}"))),
            v => Ok(v),
        }
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub rate_bits: f64,
    pub t0: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub geometry: NetworkGeometry,
    pub fading: Fading,
    pub snr_db: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub delta_exp: f64,
    pub protocol: Protocol,
    pub r_grid: Vec<f64>,
    pub grid_step: f64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn rate(&self) -> f64 {
        doqf::bits_to_nats(self.rate_bits)
    }

    pub fn resolve(command: Command, s: &Settings) -> Result<Self, UsageError> {
        let rate_bits = s.float("rate_bits")?.unwrap_or(2.0);
        if rate_bits < 0.0 {
            return Err(usage(format!("rate_bits: must be >= 0, got {rate_bits}")));
        }
        let t0 = s.float("t0")?.unwrap_or(0.5);
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(usage(format!("t0: must lie in (0, 1), got {t0}")));
        }
        let t1 = 1.0 - t0;
        let alpha0 = pick_power("alpha0", s.float("alpha0")?, "beta0", s.float("beta0")?, 1.0)?
            .unwrap_or(0.5);
        let alpha1 = pick_power("alpha1", s.float("alpha1")?, "beta1", s.float("beta1")?, t1)?
            .unwrap_or(0.5 / t1);

        let exponent = s.float("exponent")?.unwrap_or(3.0);
        let geometry = match s.raw("geometry") {
            None => NetworkGeometry { exponent, ..NetworkGeometry::default_line() },
            Some(g) => {
                let d = parse_list(g, "geometry")?;
                if d.len() != 3 {
                    return Err(usage(format!("geometry: expected d01,d12,d02, got {g:?}")));
                }
                NetworkGeometry { d_sr: d[0], d_rd: d[1], d_sd: d[2], exponent, scale: None }
            }
        };
        geometry.validate().map_err(|e| usage(e.to_string()))?;

        let rice_mean = s.float("rice_mean")?;
        let fading = match s.raw("channel").unwrap_or("rayleigh") {
            "rayleigh" => {
                if rice_mean.is_some() {
                    return Err(usage("rice_mean: only valid with channel=rice"));
                }
                Fading::Rayleigh
            }
            "rice" => Fading::Rice { mean: rice_mean.unwrap_or(1.0) },
            other => return Err(usage(format!("channel: expected rayleigh or rice, got {other:?}"))),
        };

        let snr_db = parse_range(s.raw("snr_db").unwrap_or("10:40:5"), "snr_db")?;
        let samples = match s.raw("samples") {
            None => 1_000_000,
            Some(v) => parse_count(v).ok_or_else(|| usage(format!("samples: expected a positive integer, got {v:?}")))?,
        };
        let seed = s.get::<u64>("seed")?.unwrap_or(0);
        let delta_exp = s.float("delta_exp")?.unwrap_or_else(|| SimConfig::default_delta(t0));
        let protocol = match s.raw("protocol") {
            None => Protocol::Doqf,
            Some(p) => p.parse().map_err(|_| usage(format!("protocol: expected doqf, df or cutset, got {p:?}")))?,
        };
        let default_r = if command == Command::DmtVerify { "0.05:0.95:0.05" } else { "0:1:0.01" };
        let r_grid = parse_range(s.raw("r_grid").unwrap_or(default_r), "r_grid")?;
        let grid_step = s.float("grid_step")?.unwrap_or(0.005);
        if !(grid_step > 0.0 && grid_step <= 0.5) {
            return Err(usage(format!("grid_step: must lie in (0, 0.5], got {grid_step}")));
        }
        let out = s.raw("out").map(PathBuf::from);

        Ok(RunConfig {
            command,
            rate_bits,
            t0,
            alpha0,
            alpha1,
            geometry,
            fading,
            snr_db,
            samples,
            seed,
            delta_exp,
            protocol,
            r_grid,
            grid_step,
            out,
        })
    }
}

/// Resolves a power factor given either directly or as its convexified `beta = alpha * scale`.
fn pick_power(
    a_name: &str,
    alpha: Option<f64>,
    b_name: &str,
    beta: Option<f64>,
    scale: f64,
) -> Result<Option<f64>, UsageError> {
    let from_beta = beta.map(|b| b / scale);
    match (alpha, from_beta) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-12 * a.abs().max(1.0) => Err(usage(format!(
            "{a_name} and {b_name} disagree: {a_name}={a} implies {b_name}={}",
            a * scale
        ))),
        (Some(a), _) | (None, Some(a)) => {
            if a > 0.0 {
                Ok(Some(a))
            } else {
                Err(usage(format!("{a_name}: must be > 0, got {a}")))
            }
        }
        (None, None) => Ok(None),
    }
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>, UsageError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| usage(format!("{key}: cannot parse {p:?}")))
        })
        .collect()
}

/// Accepts `1000000`, `1_000_000` or `1e6`.
fn parse_count(s: &str) -> Option<u64> {
    let s = s.replace('_', "");
    let n = s.parse::<u64>().ok().or_else(|| {
        let f = s.parse::<f64>().ok()?;
        (f.fract() == 0.0 && f >= 1.0 && f < 1.8e19).then_some(f as u64)
    })?;
    (n > 0).then_some(n)
}

/// `A:B:STEP` expands to `A, A+STEP, ...` up to and including `B`; a single number is a
/// one-point range.
pub fn parse_range(s: &str, key: &str) -> Result<Vec<f64>, UsageError> {
    let parts = parse_list(&s.replace(':', ","), key)?;
    match parts[..] {
        [a] => Ok(vec![a]),
        [a, b, step] => {
            if !(step > 0.0) {
                return Err(usage(format!("{key}: step must be > 0, got {step}")));
            }
            if b < a {
                return Err(usage(format!("{key}: end {b} is below start {a}")));
            }
            let n = ((b - a) / step + 1e-9).floor();
            if n >= MAX_RANGE_POINTS as f64 {
                return Err(usage(format!("{key}: more than {MAX_RANGE_POINTS} points")));
            }
            Ok((0..=n as usize).map(|k| a + k as f64 * step).collect())
        }
        _ => Err(usage(format!("{key}: expected A:B:STEP or a single value, got {s:?}"))),
    }
}
