use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Outage and diversity analysis of a half-duplex relay channel.
///
/// Every option can also be given in a config file as `key = value` with dashes replaced
/// by underscores. Command-line flags take precedence over the file.
#[derive(Debug, Parser)]
#[command(name = "doqf", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,

    /// Config file with `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// High-SNR outage gains of the cut-set bound, DoQF and DF.
    Gain,
    /// Minimize the DoQF outage gain over slot split and power split.
    Optimize,
    /// Monte Carlo outage probability over an SNR sweep.
    Simulate,
    /// Diversity-multiplexing tradeoff curves.
    Dmt,
    /// Compare the closed-form tradeoff with a brute-force grid evaluation.
    DmtVerify,
}

#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Options {
    /// Target rate in bits per channel use [default: 2].
    #[arg(long, global = true)]
    pub rate_bits: Option<String>,
    /// Fraction of the frame in which the relay listens [default: 0.5].
    #[arg(long, global = true)]
    pub t0: Option<String>,
    /// Source power factor [default: 0.5].
    #[arg(long, global = true)]
    pub alpha0: Option<String>,
    /// Relay power factor [default: 0.5 / (1 - t0)].
    #[arg(long, global = true)]
    pub alpha1: Option<String>,
    /// Source energy share, equal to alpha0.
    #[arg(long, global = true)]
    pub beta0: Option<String>,
    /// Relay energy share, alpha1 * (1 - t0).
    #[arg(long, global = true)]
    pub beta1: Option<String>,
    /// Distances source-relay, relay-destination, source-destination [default: 2/3,1/3,1].
    #[arg(long, global = true, value_name = "D01,D12,D02")]
    pub geometry: Option<String>,
    /// Path-loss exponent [default: 3].
    #[arg(long, global = true)]
    pub exponent: Option<String>,
    /// rayleigh or rice [default: rayleigh].
    #[arg(long, global = true)]
    pub channel: Option<String>,
    /// Line-of-sight magnitude for Rice fading [default: 1].
    #[arg(long, global = true)]
    pub rice_mean: Option<String>,
    /// SNR sweep in dB [default: 10:40:5].
    #[arg(long, global = true, value_name = "A:B:STEP", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Monte Carlo samples per SNR point [default: 1000000].
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Seed of the sample streams [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Quantizer distortion decays as snr^-delta_exp [default: (1 - t0) / (2 t0)].
    #[arg(long, global = true)]
    pub delta_exp: Option<String>,
    /// doqf, df or cutset [default: doqf].
    #[arg(long, global = true)]
    pub protocol: Option<String>,
    /// Multiplexing gains [default: 0:1:0.01, or 0.05:0.95:0.05 for dmt-verify].
    #[arg(long, global = true, value_name = "A:B:STEP")]
    pub r_grid: Option<String>,
    /// Grid step of the brute-force tradeoff evaluation [default: 0.005].
    #[arg(long, global = true)]
    pub grid_step: Option<String>,
    /// Output CSV file [default: stdout].
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
}

impl Options {
    pub fn pairs(&self) -> [(&'static str, &Option<String>); 18] {
        [
            ("rate_bits", &self.rate_bits),
            ("t0", &self.t0),
            ("alpha0", &self.alpha0),
            ("alpha1", &self.alpha1),
            ("beta0", &self.beta0),
            ("beta1", &self.beta1),
            ("geometry", &self.geometry),
            ("exponent", &self.exponent),
            ("channel", &self.channel),
            ("rice_mean", &self.rice_mean),
            ("snr_db", &self.snr_db),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("delta_exp", &self.delta_exp),
            ("protocol", &self.protocol),
            ("r_grid", &self.r_grid),
            ("grid_step", &self.grid_step),
            ("out", &self.out),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KEYS;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_is_a_config_key() {
        let o = Options::default();
        let names: Vec<_> = o.pairs().iter().map(|p| p.0).collect();
        assert_eq!(names, KEYS);
    }

    #[test]
    fn options_before_or_after_subcommand() {
        let a = Cli::try_parse_from(["doqf", "--t0", "0.6", "gain"]).unwrap();
        let b = Cli::try_parse_from(["doqf", "gain", "--t0", "0.6"]).unwrap();
        assert_eq!(a.options, b.options);
        assert_eq!(b.command, Command::Gain);
        let c = Cli::try_parse_from(["doqf", "dmt-verify", "--snr-db", "-5:5:5"]).unwrap();
        assert_eq!(c.command, Command::DmtVerify);
        assert_eq!(c.options.snr_db.as_deref(), Some("-5:5:5"));
    }
}
