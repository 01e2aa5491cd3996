//! CSV records written by the command line tool and read back by its tests.
//!
//! Floats are written with 17 significant digits so that every value round-trips.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize, Serializer};

use crate::dmt::DmtRow;
use crate::dmt_oracle::VerifyRow;
use crate::error::Result;
use crate::montecarlo::SweepPoint;

fn full<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_full(*v))
}

/// `v` with 17 significant digits in scientific notation.
pub fn format_full(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(serialize_with = "full")]
    pub snr_db: f64,
    pub protocol: String,
    pub n_samples: u64,
    #[serde(serialize_with = "full")]
    pub p_hat: f64,
    #[serde(serialize_with = "full")]
    pub ci_low: f64,
    #[serde(serialize_with = "full")]
    pub ci_high: f64,
    #[serde(serialize_with = "full")]
    pub rho2_phat: f64,
    #[serde(serialize_with = "full")]
    pub xi_ref: f64,
    pub branch1: u64,
    pub branch2: u64,
    pub branch3: u64,
    pub branch4: u64,
}

impl From<&SweepPoint> for SweepRecord {
    fn from(p: &SweepPoint) -> Self {
        let e = &p.estimate;
        Self {
            snr_db: p.snr_db,
            protocol: p.protocol.to_string(),
            n_samples: e.n_samples,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            rho2_phat: p.rho2_phat,
            xi_ref: p.xi_ref,
            branch1: e.branch_outages[0],
            branch2: e.branch_outages[1],
            branch3: e.branch_outages[2],
            branch4: e.branch_outages[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmtRecord {
    #[serde(serialize_with = "full")]
    pub r: f64,
    #[serde(serialize_with = "full")]
    pub d_doqf: f64,
    #[serde(serialize_with = "full")]
    pub d_df: f64,
    #[serde(serialize_with = "full")]
    pub d_miso: f64,
    #[serde(serialize_with = "full")]
    pub t0_star: f64,
    #[serde(serialize_with = "full")]
    pub delta_star: f64,
}

impl From<&DmtRow> for DmtRecord {
    fn from(d: &DmtRow) -> Self {
        Self {
            r: d.r,
            d_doqf: d.doqf.d,
            d_df: d.df.d,
            d_miso: d.miso,
            t0_star: d.doqf.t0,
            delta_star: d.doqf.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    #[serde(serialize_with = "full")]
    pub r: f64,
    #[serde(serialize_with = "full")]
    pub d_analytic: f64,
    #[serde(serialize_with = "full")]
    pub d_oracle: f64,
    #[serde(serialize_with = "full")]
    pub abs_error: f64,
    #[serde(serialize_with = "full")]
    pub t0_star_analytic: f64,
    #[serde(serialize_with = "full")]
    pub t0_best_oracle: f64,
}

impl From<&VerifyRow> for VerifyRecord {
    fn from(v: &VerifyRow) -> Self {
        Self {
            r: v.r,
            d_analytic: v.d_analytic,
            d_oracle: v.d_oracle,
            abs_error: v.abs_error,
            t0_star_analytic: v.t0_star_analytic,
            t0_best_oracle: v.t0_best_oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    #[serde(serialize_with = "full")]
    pub t0: f64,
    #[serde(serialize_with = "full")]
    pub alpha0: f64,
    #[serde(serialize_with = "full")]
    pub alpha1: f64,
    #[serde(serialize_with = "full")]
    pub rate_nats: f64,
    #[serde(serialize_with = "full")]
    pub xi_cs_hd: f64,
    #[serde(serialize_with = "full")]
    pub term_simo: f64,
    #[serde(serialize_with = "full")]
    pub term_miso: f64,
    #[serde(serialize_with = "full")]
    pub xi_doqf: f64,
    #[serde(serialize_with = "full")]
    pub xi_df: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRecord {
    #[serde(serialize_with = "full")]
    pub t1_star: f64,
    #[serde(serialize_with = "full")]
    pub beta0_star: f64,
    #[serde(serialize_with = "full")]
    pub beta1_star: f64,
    #[serde(serialize_with = "full")]
    pub t0_star: f64,
    #[serde(serialize_with = "full")]
    pub alpha0_star: f64,
    #[serde(serialize_with = "full")]
    pub alpha1_star: f64,
    #[serde(serialize_with = "full")]
    pub xi_star: f64,
    #[serde(serialize_with = "full")]
    pub xi_reference: f64,
    #[serde(serialize_with = "full")]
    pub grad_norm: f64,
    pub iterations: u64,
}

/// Serializes `rows` as CSV with a header line.
pub fn to_csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn from_csv_reader<T: DeserializeOwned, R: io::Read>(reader: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    from_csv_reader(fs::File::open(path)?)
}

/// Writes `rows` to `path` through a temporary file in the same directory that is renamed
/// into place, or to stdout when `path` is `None`.
pub fn write_csv<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<()> {
    let bytes = to_csv_bytes(rows)?;
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
        }
        Some(p) => write_atomic(p, &bytes)?,
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = temp_path(path);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}
