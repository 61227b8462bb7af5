//! Gumbel asymptotics for the selected-antenna SINR and rate.
//!
//! The per-antenna SINR lies in the maximum domain of attraction of the
//! Gumbel law, so `max_i γ_i` and `max_i ln(1 + γ_i)` are approximated by
//! `G(x) = exp(-exp(-(x - a_N)/b_N))`. This module provides the normalizing
//! constants `(a_N, b_N)` from the exact quantile function and from the
//! closed-form regime approximations, the resulting mean and outage
//! capacities, and a numerical check of the domain-of-attraction condition.

use std::fmt;
use std::str::FromStr;

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::exact::{sinr_ccdf, sinr_quantile_tail, QuantileSolverConfig};
use crate::special::{lambert_w0, lambert_w0_of_exp, scaled_upper_incomplete_gamma_zero, EULER_GAMMA};

/// Mean of the standard Gumbel law.
pub const E0: f64 = EULER_GAMMA;

/// Which random variable the constants normalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `γ_max` in linear SINR units.
    Sinr,
    /// `R_max = ln(1 + γ_max)` in nats/s/Hz.
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelConstants {
    pub a_n: f64,
    pub b_n: f64,
    pub n_antennas: usize,
    pub family: Family,
}

impl GumbelConstants {
    /// Gumbel CDF with these location/scale constants.
    pub fn cdf(&self, x: f64) -> f64 {
        (-(-(x - self.a_n) / self.b_n).exp()).exp()
    }
}

/// Analytical variant used to produce rate-family constants. Always chosen by
/// the caller; nothing here infers a regime from the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeFormulas {
    /// Constants from the exact SINR quantile function.
    Exact,
    /// Interference-power-limited closed forms (`P_max → ∞`).
    Iplr,
    /// Transmit-power-limited closed forms (`Q ≫ P_max`), via Lambert W.
    Tplr,
    /// Transmit-power-limited with negligible PU interference.
    TplrLow,
}

impl RegimeFormulas {
    pub const ALL: [RegimeFormulas; 4] = [Self::Exact, Self::Iplr, Self::Tplr, Self::TplrLow];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Iplr => "iplr",
            Self::Tplr => "tplr",
            Self::TplrLow => "tplr_low",
        }
    }
}

impl fmt::Display for RegimeFormulas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegimeFormulas {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exact" => Ok(Self::Exact),
            "iplr" => Ok(Self::Iplr),
            "tplr" => Ok(Self::Tplr),
            "tplr_low" => Ok(Self::TplrLow),
            other => Err(format!("unknown regime `{other}`")),
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            reason: "outage probability must lie in (0, 1)",
        })
    }
}

fn check_antennas(n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "n_antennas",
            value: n as f64,
            reason: if min > 1 {
                "Gumbel constants from the quantile function need N >= 2"
            } else {
                "at least one antenna is required"
            },
        })
    }
}

/// `(F^{-1}(1 - 1/N), F^{-1}(1 - 1/(Ne)))` of the per-antenna SINR.
fn exact_tail_quantiles(params: &SystemParams, n_antennas: usize) -> Result<(f64, f64)> {
    check_antennas(n_antennas, 2)?;
    let cfg = QuantileSolverConfig::default();
    let n = n_antennas as f64;
    let x_n = sinr_quantile_tail(1.0 / n, params, &cfg)?;
    let x_ne = sinr_quantile_tail(1.0 / (n * std::f64::consts::E), params, &cfg)?;
    Ok((x_n, x_ne))
}

/// SINR-family constants `a_N = F^{-1}(1 - 1/N)`, `b_N = F^{-1}(1 - 1/(Ne)) - a_N`.
pub fn gumbel_constants_sinr(params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    let (x_n, x_ne) = exact_tail_quantiles(params, n_antennas)?;
    Ok(GumbelConstants {
        a_n: x_n,
        b_n: x_ne - x_n,
        n_antennas,
        family: Family::Sinr,
    })
}

/// Rate-family constants from the exact quantile function:
/// `a_N = ln(1 + F^{-1}(1 - 1/N))`,
/// `b_N = ln[(1 + F^{-1}(1 - 1/(Ne))) / (1 + F^{-1}(1 - 1/N))]`.
pub fn gumbel_constants_rate(params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    let (x_n, x_ne) = exact_tail_quantiles(params, n_antennas)?;
    let a_n = x_n.ln_1p();
    Ok(GumbelConstants {
        a_n,
        b_n: x_ne.ln_1p() - a_n,
        n_antennas,
        family: Family::Rate,
    })
}

/// Mean of the Gumbel approximation, `a_N + b_N·E₀`. Meant for rate-family
/// constants, where it approximates the mean capacity in nats/s/Hz.
pub fn asymptotic_mean_capacity(constants: &GumbelConstants) -> f64 {
    constants.a_n + constants.b_n * E0
}

/// `ε`-quantile of the Gumbel approximation, `a_N - b_N·ln ln(1/ε)`.
///
/// Defined for every `ε ∈ (0, 1)`; for `ε > 1/e` the double logarithm is
/// negative and the result exceeds `a_N`.
pub fn asymptotic_outage_capacity(constants: &GumbelConstants, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(constants.a_n - constants.b_n * log_log_inv(epsilon))
}

/// `ln ln(1/ε)`, computed so that `ε = e^{-1}` gives zero.
fn log_log_inv(epsilon: f64) -> f64 {
    (-epsilon.ln()).ln()
}

/// Interference-limited constant
/// `c_p = e^{σ²/(P_p q̄)}·Γ(0, σ²/(P_p q̄)) / (P_p q̄)`.
pub fn iplr_c_p(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    let ppq = params.mean_interference();
    Ok(scaled_upper_incomplete_gamma_zero(params.noise / ppq)? / ppq)
}

/// `c_p·Q·ḡ/h̄`: the per-antenna SINR tail is `≈ K/x` when `P_max → ∞`.
fn iplr_scale(params: &SystemParams) -> Result<f64> {
    Ok(iplr_c_p(params)? * params.q_limit * params.mean_g / params.mean_h)
}

pub fn iplr_constants(params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    check_antennas(n_antennas, 1)?;
    let kn = iplr_scale(params)? * n_antennas as f64;
    let a_n = kn.ln_1p();
    Ok(GumbelConstants {
        a_n,
        b_n: (kn * std::f64::consts::E).ln_1p() - a_n,
        n_antennas,
        family: Family::Rate,
    })
}

/// `ln(1 + c_p(Qḡ/h̄)N) + E₀`: the interference-limited mean capacity with
/// `b_N` replaced by its limit 1.
pub fn iplr_mean_capacity(params: &SystemParams, n_antennas: usize) -> Result<f64> {
    Ok(iplr_constants(params, n_antennas)?.a_n + E0)
}

/// Finite-`N` interference-limited outage capacity, `a_N - b_N ln ln(1/ε)`.
pub fn iplr_outage_capacity(params: &SystemParams, n_antennas: usize, epsilon: f64) -> Result<f64> {
    asymptotic_outage_capacity(&iplr_constants(params, n_antennas)?, epsilon)
}

/// Large-`N` form with `b_N = 1`: `C^IPLR - E₀ - ln ln(1/ε)`.
pub fn iplr_outage_capacity_large_n(params: &SystemParams, n_antennas: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(iplr_mean_capacity(params, n_antennas)? - E0 - log_log_inv(epsilon))
}

/// `θ·W(M·c_q·s·e^{s}) - θ·s` with `s = σ²/(P_p q̄)` and `θ = P_max ḡ/σ²`:
/// the transmit-power-limited inverse CDF at tail mass `1/M`.
fn tplr_inverse_tail(params: &SystemParams, multiplier: f64) -> Result<f64> {
    let s = params.noise / params.mean_interference();
    let c_q = params.c_q();
    let ln_arg = multiplier.ln() + c_q.ln() + s + s.ln();
    let w = if ln_arg < 700.0 {
        lambert_w0(ln_arg.exp())?
    } else {
        lambert_w0_of_exp(ln_arg)?
    };
    Ok(params.snr_scale() * (w - s))
}

/// Transmit-power-limited constants through the Lambert W inverse of the
/// tail approximation.
pub fn tplr_constants(params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    check_antennas(n_antennas, 1)?;
    params.validate()?;
    let n = n_antennas as f64;
    let x_n = tplr_inverse_tail(params, n)?;
    let x_ne = tplr_inverse_tail(params, n * std::f64::consts::E)?;
    if !(1.0 + x_n > 0.0) {
        return Err(Error::OutOfRegime(format!(
            "TPLR location argument 1 + {x_n} is not positive at N = {n_antennas}; \
             the transmit-power-limited tail approximation does not hold"
        )));
    }
    let a_n = x_n.ln_1p();
    Ok(GumbelConstants {
        a_n,
        b_n: x_ne.ln_1p() - a_n,
        n_antennas,
        family: Family::Rate,
    })
}

pub fn tplr_mean_capacity(params: &SystemParams, n_antennas: usize) -> Result<f64> {
    Ok(asymptotic_mean_capacity(&tplr_constants(params, n_antennas)?))
}

pub fn tplr_outage_capacity(params: &SystemParams, n_antennas: usize, epsilon: f64) -> Result<f64> {
    asymptotic_outage_capacity(&tplr_constants(params, n_antennas)?, epsilon)
}

/// Transmit-power-limited constants when the PU interference is negligible:
/// `a = ln(1 + θ ln(c_q N))`, `b = ln(1 + θ/(1 + θ ln(c_q N)))`.
pub fn tplr_low_constants(params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    check_antennas(n_antennas, 1)?;
    params.validate()?;
    let cqn = params.c_q() * n_antennas as f64;
    if !(cqn > 1.0) {
        return Err(Error::OutOfRegime(format!(
            "low-interference TPLR needs c_q*N > 1, got {cqn}"
        )));
    }
    let theta = params.snr_scale();
    let inner = 1.0 + theta * cqn.ln();
    Ok(GumbelConstants {
        a_n: inner.ln(),
        b_n: (theta / inner).ln_1p(),
        n_antennas,
        family: Family::Rate,
    })
}

/// Low-interference TPLR capacity: the mean when `epsilon` is `None`, the
/// outage capacity otherwise.
pub fn tplr_low_interference(params: &SystemParams, n_antennas: usize, epsilon: Option<f64>) -> Result<f64> {
    let c = tplr_low_constants(params, n_antennas)?;
    match epsilon {
        None => Ok(asymptotic_mean_capacity(&c)),
        Some(eps) => asymptotic_outage_capacity(&c, eps),
    }
}

/// Rate-family constants for the chosen formula set.
pub fn regime_constants(regime: RegimeFormulas, params: &SystemParams, n_antennas: usize) -> Result<GumbelConstants> {
    match regime {
        RegimeFormulas::Exact => gumbel_constants_rate(params, n_antennas),
        RegimeFormulas::Iplr => iplr_constants(params, n_antennas),
        RegimeFormulas::Tplr => tplr_constants(params, n_antennas),
        RegimeFormulas::TplrLow => tplr_low_constants(params, n_antennas),
    }
}

/// `a_N + b_N·E₀` with the chosen regime's constants.
pub fn regime_mean_capacity(regime: RegimeFormulas, params: &SystemParams, n_antennas: usize) -> Result<f64> {
    Ok(asymptotic_mean_capacity(&regime_constants(regime, params, n_antennas)?))
}

/// `a_N - b_N·ln ln(1/ε)` with the chosen regime's constants.
pub fn regime_outage_capacity(
    regime: RegimeFormulas,
    params: &SystemParams,
    n_antennas: usize,
    epsilon: f64,
) -> Result<f64> {
    asymptotic_outage_capacity(&regime_constants(regime, params, n_antennas)?, epsilon)
}

/// Relative step of the central differences in the MDA check.
const MDA_REL_STEP: f64 = 1e-5;
/// Relative step for differentiating the hazard reciprocal itself.
const MDA_RATIO_REL_STEP: f64 = 1e-3;
/// The grid must reach this multiple of the expected hazard-reciprocal limit.
pub const MDA_GRID_EXTENT: f64 = 50.0;
pub const MDA_DERIVATIVE_TOL: f64 = 0.05;
pub const MDA_LIMIT_REL_TOL: f64 = 0.05;

/// Tail behaviour of `(1 - F)/f` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MdaDiagnostics {
    pub x_grid: Vec<f64>,
    /// `(1 - F(x))/f(x)`.
    pub hazard_reciprocal: Vec<f64>,
    /// `d/dx [(1 - F(x))/f(x)]`.
    pub derivative_of_ratio: Vec<f64>,
    /// Hazard reciprocal at the last grid point.
    pub limit_estimate: f64,
    /// Analytical limit the hazard reciprocal should approach.
    pub expected_limit: f64,
}

impl MdaDiagnostics {
    pub fn tail_derivative(&self) -> f64 {
        *self.derivative_of_ratio.last().expect("non-empty grid")
    }

    pub fn derivative_ok(&self) -> bool {
        self.tail_derivative().abs() <= MDA_DERIVATIVE_TOL
    }

    pub fn limit_relative_error(&self) -> f64 {
        (self.limit_estimate - self.expected_limit).abs() / self.expected_limit
    }

    pub fn limit_ok(&self) -> bool {
        self.limit_relative_error() <= MDA_LIMIT_REL_TOL
    }

    pub fn passed(&self) -> bool {
        self.derivative_ok() && self.limit_ok()
    }
}

/// Checks the Gumbel domain-of-attraction condition for the per-antenna SINR:
/// `(1 - F)/f` should flatten out and approach `P_max ḡ/σ²`.
pub fn verify_mda_condition(params: &SystemParams, x_grid: &[f64]) -> Result<MdaDiagnostics> {
    params.validate()?;
    mda_diagnostics(|x| sinr_ccdf(x, params), x_grid, params.snr_scale())
}

/// Same diagnostics for an arbitrary survival function `1 - F`.
pub fn mda_diagnostics<S>(survival: S, x_grid: &[f64], expected_limit: f64) -> Result<MdaDiagnostics>
where
    S: Fn(f64) -> Result<f64>,
{
    let Some(&last) = x_grid.last() else {
        return Err(Error::GridTooShort("empty grid".into()));
    };
    if x_grid[0] <= 0.0 || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain {
            name: "x_grid",
            value: x_grid[0],
            reason: "grid must be positive and strictly increasing",
        });
    }
    let needed = MDA_GRID_EXTENT * expected_limit;
    if last < needed {
        return Err(Error::GridTooShort(format!(
            "last grid point {last} is below {MDA_GRID_EXTENT} x limit = {needed}"
        )));
    }

    let density = |x: f64| -> Result<f64> {
        let h = MDA_REL_STEP * x;
        Ok((survival(x - h)? - survival(x + h)?) / (2.0 * h))
    };
    let ratio = |x: f64| -> Result<f64> {
        let s = survival(x)?;
        if !(s >= f64::MIN_POSITIVE) {
            return Err(Error::GridTooShort(format!(
                "survival function underflows at x = {x}; shorten the grid"
            )));
        }
        Ok(s / density(x)?)
    };

    let mut hazard_reciprocal = Vec::with_capacity(x_grid.len());
    let mut derivative_of_ratio = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        hazard_reciprocal.push(ratio(x)?);
        let h = MDA_RATIO_REL_STEP * x;
        derivative_of_ratio.push((ratio(x + h)? - ratio(x - h)?) / (2.0 * h));
    }
    let limit_estimate = *hazard_reciprocal.last().expect("non-empty grid");
    Ok(MdaDiagnostics {
        x_grid: x_grid.to_vec(),
        hazard_reciprocal,
        derivative_of_ratio,
        limit_estimate,
        expected_limit,
    })
}

/// `points` log-spaced values from `lo` to `hi`, both inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}
