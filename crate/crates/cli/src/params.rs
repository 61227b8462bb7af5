//! Turning user inputs (dB or linear primitives plus the usual power ratios)
//! into a validated [`SystemParams`].

use std::fmt;

use evtcr::units::db_to_linear;
use evtcr::SystemParams;

use crate::error::CliError;

/// Noise power used when neither the inputs nor a ratio pins it (-10 dB).
pub const DEFAULT_NOISE: f64 = 0.1;
/// Relative mismatch tolerated between a ratio and the primitives it links.
const RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Db,
    Linear,
}

impl Unit {
    pub fn to_linear(self, v: f64) -> f64 {
        match self {
            Unit::Db => db_to_linear(v),
            Unit::Linear => v,
        }
    }
}

/// The four powers the ratios are defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    PMax,
    QLimit,
    PP,
    Noise,
}

impl Power {
    const ALL: [Power; 4] = [Power::PMax, Power::QLimit, Power::PP, Power::Noise];

    pub fn key(self) -> &'static str {
        match self {
            Power::PMax => "p_max",
            Power::QLimit => "q_limit",
            Power::PP => "p_p",
            Power::Noise => "noise",
        }
    }
}

/// Power ratios, each `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ratio {
    Inr,
    SirQ,
    SirP,
    SnrQ,
    SnrP,
    Pqr,
}

impl Ratio {
    pub const ALL: [Ratio; 6] = [Ratio::Inr, Ratio::SirQ, Ratio::SirP, Ratio::SnrQ, Ratio::SnrP, Ratio::Pqr];

    pub fn key(self) -> &'static str {
        match self {
            Ratio::Inr => "inr",
            Ratio::SirQ => "sir_q",
            Ratio::SirP => "sir_p",
            Ratio::SnrQ => "snr_q",
            Ratio::SnrP => "snr_p",
            Ratio::Pqr => "pqr",
        }
    }

    fn terms(self) -> (Power, Power) {
        match self {
            Ratio::Inr => (Power::PP, Power::Noise),
            Ratio::SirQ => (Power::QLimit, Power::PP),
            Ratio::SirP => (Power::PMax, Power::PP),
            Ratio::SnrQ => (Power::QLimit, Power::Noise),
            Ratio::SnrP => (Power::PMax, Power::Noise),
            Ratio::Pqr => (Power::PMax, Power::QLimit),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Linear-scale inputs; anything left `None` is derived or defaulted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamInputs {
    pub p_max: Option<f64>,
    pub q_limit: Option<f64>,
    pub p_p: Option<f64>,
    pub noise: Option<f64>,
    pub mean_g: Option<f64>,
    pub mean_h: Option<f64>,
    pub mean_q: Option<f64>,
    pub ratios: Vec<(Ratio, f64)>,
}

impl ParamInputs {
    fn power(&self, p: Power) -> Option<f64> {
        match p {
            Power::PMax => self.p_max,
            Power::QLimit => self.q_limit,
            Power::PP => self.p_p,
            Power::Noise => self.noise,
        }
    }

    pub fn set_power(&mut self, p: Power, v: f64) {
        let slot = match p {
            Power::PMax => &mut self.p_max,
            Power::QLimit => &mut self.q_limit,
            Power::PP => &mut self.p_p,
            Power::Noise => &mut self.noise,
        };
        *slot = Some(v);
    }

    /// Expands the ratios into primitives. A ratio that disagrees with the
    /// primitives it links is an error, never a silent override.
    pub fn resolve(&self) -> Result<SystemParams, CliError> {
        let mut powers: [Option<f64>; 4] = Power::ALL.map(|p| self.power(p));
        propagate(&mut powers, &self.ratios)?;
        if powers[3].is_none() {
            powers[3] = Some(DEFAULT_NOISE);
            propagate(&mut powers, &self.ratios)?;
        }
        let missing: Vec<&str> = Power::ALL
            .iter()
            .zip(&powers)
            .filter(|(_, v)| v.is_none())
            .map(|(p, _)| p.key())
            .collect();
        if !missing.is_empty() {
            return Err(CliError::Params(format!(
                "cannot determine {} from the given values and ratios",
                missing.join(", ")
            )));
        }
        let [p_max, q_limit, p_p, noise] = powers.map(|v| v.unwrap_or_default());
        SystemParams::new(
            p_max,
            q_limit,
            p_p,
            noise,
            self.mean_g.unwrap_or(1.0),
            self.mean_h.unwrap_or(1.0),
            self.mean_q.unwrap_or(1.0),
        )
        .map_err(|e| CliError::Params(e.to_string()))
    }
}

fn index(p: Power) -> usize {
    Power::ALL.iter().position(|&q| q == p).unwrap_or_default()
}

fn propagate(powers: &mut [Option<f64>; 4], ratios: &[(Ratio, f64)]) -> Result<(), CliError> {
    loop {
        let mut changed = false;
        for &(ratio, r) in ratios {
            let (num, den) = ratio.terms();
            let (i, j) = (index(num), index(den));
            match (powers[i], powers[j]) {
                (Some(a), Some(b)) => {
                    if ((a / b) / r - 1.0).abs() > RATIO_TOL {
                        return Err(CliError::Params(format!(
                            "{ratio} conflicts with {} = {a} and {} = {b} (ratio {} in linear terms, given {r})",
                            num.key(),
                            den.key(),
                            a / b
                        )));
                    }
                }
                (Some(a), None) => {
                    powers[j] = Some(a / r);
                    changed = true;
                }
                (None, Some(b)) => {
                    powers[i] = Some(b * r);
                    changed = true;
                }
                (None, None) => {}
            }
        }
        if !changed {
            return Ok(());
        }
    }
}
