//! Fading models for the three links and the path-loss geometry that sets their variances.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    Rayleigh,
    /// Line-of-sight component with the given magnitude.
    Rice { mean: f64 },
}

/// Distribution of a power gain `|h|^2` for a circularly symmetric Gaussian `h`
/// with mean magnitude `mean` (zero for Rayleigh) and scatter variance `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    fading: Fading,
    sigma2: f64,
}

impl ChannelModel {
    pub fn rayleigh(sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        Ok(Self { fading: Fading::Rayleigh, sigma2 })
    }

    pub fn rice(mean: f64, sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        if !mean.is_finite() || mean < 0.0 {
            return Err(invalid(format!("Rice mean magnitude must be finite and >= 0, got {mean}")));
        }
        Ok(Self { fading: Fading::Rice { mean }, sigma2 })
    }

    pub fn fading(&self) -> Fading {
        self.fading
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Value of the gain density at the origin.
    pub fn density_at_zero(&self) -> f64 {
        match self.fading {
            Fading::Rayleigh => 1.0 / self.sigma2,
            Fading::Rice { mean } => (-mean * mean / self.sigma2).exp() / self.sigma2,
        }
    }

    /// Mean power gain.
    pub fn mean_gain(&self) -> f64 {
        match self.fading {
            Fading::Rayleigh => self.sigma2,
            Fading::Rice { mean } => mean * mean + self.sigma2,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.fading {
            Fading::Rayleigh => {
                let e: f64 = Exp1.sample(rng);
                self.sigma2 * e
            }
            Fading::Rice { mean } => {
                let s = (0.5 * self.sigma2).sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let re = mean + s * re;
                let im = s * im;
                re * re + im * im
            }
        }
    }
}

fn check_variance(sigma2: f64) -> Result<()> {
    if sigma2.is_finite() && sigma2 > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("variance must be finite and > 0, got {sigma2}")))
    }
}

/// Gain densities at zero for the source-relay, source-destination and relay-destination links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDensities {
    pub sr: f64,
    pub sd: f64,
    pub rd: f64,
}

impl LinkDensities {
    pub fn new(sr: f64, sd: f64, rd: f64) -> Result<Self> {
        for (name, c) in [("sr", sr), ("sd", sd), ("rd", rd)] {
            if !c.is_finite() || c <= 0.0 {
                return Err(invalid(format!("density {name} must be finite and > 0, got {c}")));
            }
        }
        Ok(Self { sr, sd, rd })
    }

    pub fn unit() -> Self {
        Self { sr: 1.0, sd: 1.0, rd: 1.0 }
    }
}

/// The three links of the relay channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayChannels {
    pub sr: ChannelModel,
    pub sd: ChannelModel,
    pub rd: ChannelModel,
}

impl RelayChannels {
    pub fn densities(&self) -> LinkDensities {
        LinkDensities {
            sr: self.sr.density_at_zero(),
            sd: self.sd.density_at_zero(),
            rd: self.rd.density_at_zero(),
        }
    }

    /// Draws `(g_sr, g_sd, g_rd)` in that order.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        let sr = self.sr.sample(rng);
        let sd = self.sd.sample(rng);
        let rd = self.rd.sample(rng);
        [sr, sd, rd]
    }
}

/// Distances between source (0), relay (1) and destination (2) with a power-law path loss
/// `sigma2 = scale * d^-exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkGeometry {
    pub d_sr: f64,
    pub d_rd: f64,
    pub d_sd: f64,
    pub exponent: f64,
    /// Path-loss scale. `None` picks the scale that gives the direct link unit variance.
    pub scale: Option<f64>,
}

impl NetworkGeometry {
    pub fn new(d_sr: f64, d_rd: f64, d_sd: f64, exponent: f64) -> Result<Self> {
        let g = Self { d_sr, d_rd, d_sd, exponent, scale: None };
        g.validate()?;
        Ok(g)
    }

    /// Relay on the segment at two thirds of the way to the destination, exponent 3.
    pub fn default_line() -> Self {
        Self { d_sr: 2.0 / 3.0, d_rd: 1.0 / 3.0, d_sd: 1.0, exponent: 3.0, scale: None }
    }

    /// Relay on the source-destination segment at distance `d_sr` from the source.
    pub fn on_segment(d_sr: f64, exponent: f64) -> Result<Self> {
        Self::new(d_sr, 1.0 - d_sr, 1.0, exponent)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("d_sr", self.d_sr), ("d_rd", self.d_rd), ("d_sd", self.d_sd)] {
            if !d.is_finite() || d <= 0.0 {
                return Err(invalid(format!("distance {name} must be finite and > 0, got {d}")));
            }
        }
        if !self.exponent.is_finite() || self.exponent <= 0.0 {
            return Err(invalid(format!("path-loss exponent must be > 0, got {}", self.exponent)));
        }
        if let Some(c) = self.scale {
            if !c.is_finite() || c <= 0.0 {
                return Err(invalid(format!("path-loss scale must be > 0, got {c}")));
            }
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.scale.unwrap_or_else(|| self.d_sd.powf(self.exponent))
    }

    /// Variances `(sr, sd, rd)`.
    pub fn variances(&self) -> (f64, f64, f64) {
        let c = self.scale();
        let v = |d: f64| c * d.powf(-self.exponent);
        (v(self.d_sr), v(self.d_sd), v(self.d_rd))
    }

    pub fn channels(&self, fading: Fading) -> Result<RelayChannels> {
        self.validate()?;
        let (sr, sd, rd) = self.variances();
        let make = |s2| match fading {
            Fading::Rayleigh => ChannelModel::rayleigh(s2),
            Fading::Rice { mean } => ChannelModel::rice(mean, s2),
        };
        Ok(RelayChannels { sr: make(sr)?, sd: make(sd)?, rd: make(rd)? })
    }
}
