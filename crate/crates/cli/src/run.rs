use doqf::allocator::minimize_outage_gain;
use doqf::dmt::table;
use doqf::dmt_oracle::verify;
use doqf::gain::{xi_cs_hd, xi_df, xi_doqf_convex, ProtocolParams};
use doqf::montecarlo::{snr_sweep, SimConfig};
use doqf::report::{
    write_csv, AllocationRecord, DmtRecord, GainRecord, SweepRecord, VerifyRecord,
};
use doqf::Result;

use crate::cli::Command;
use crate::config::RunConfig;

/// Allocator stopping tolerance on the gradient norm.
const OPT_TOLERANCE: f64 = 1e-8;

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = cfg.out.as_deref();
    let params = ProtocolParams::new(cfg.t0, cfg.alpha0, cfg.alpha1, cfg.rate())?;
    let channels = cfg.geometry.channels(cfg.fading)?;
    let c = channels.densities();
    match cfg.command {
        Command::Gain => {
            let g = xi_cs_hd(&params, &c);
            let rec = GainRecord {
                t0: params.t0,
                alpha0: params.alpha0,
                alpha1: params.alpha1,
                rate_nats: params.rate,
                xi_cs_hd: g.xi,
                term_simo: g.term_simo,
                term_miso: g.term_miso,
                xi_doqf: xi_doqf_convex(params.t1(), params.beta0(), params.beta1(), &c, params.rate),
                xi_df: xi_df(&params, &c),
            };
            write_csv(&[rec], out)
        }
        Command::Optimize => {
            let a = minimize_outage_gain(&c, params.rate, OPT_TOLERANCE)?;
            let rec = AllocationRecord {
                t1_star: a.t1_star,
                beta0_star: a.beta0_star,
                beta1_star: a.beta1_star,
                t0_star: a.t0_star(),
                alpha0_star: a.alpha0_star(),
                alpha1_star: a.alpha1_star(),
                xi_star: a.xi_star,
                xi_reference: xi_doqf_convex(params.t1(), params.beta0(), params.beta1(), &c, params.rate),
                grad_norm: a.grad_norm,
                iterations: a.iterations as u64,
            };
            write_csv(&[rec], out)
        }
        Command::Simulate => {
            let sim = SimConfig {
                params,
                channels,
                snr: 1.0,
                delta_exponent: cfg.delta_exp,
                n_samples: cfg.samples,
                seed: cfg.seed,
            };
            let rows: Vec<SweepRecord> =
                snr_sweep(&sim, cfg.protocol, &cfg.snr_db)?.iter().map(Into::into).collect();
            write_csv(&rows, out)
        }
        Command::Dmt => {
            let rows: Vec<DmtRecord> = table(&cfg.r_grid)?.iter().map(Into::into).collect();
            write_csv(&rows, out)
        }
        Command::DmtVerify => {
            let rows: Vec<VerifyRecord> =
                verify(&cfg.r_grid, cfg.grid_step)?.iter().map(Into::into).collect();
            write_csv(&rows, out)
        }
    }
}
