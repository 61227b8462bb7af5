//! Capacity evaluation methods shared by `run` and `point`.

use std::fmt;
use std::str::FromStr;

use evtcr::evt::{
    iplr_mean_capacity, iplr_outage_capacity_large_n, regime_mean_capacity, regime_outage_capacity, RegimeFormulas,
};
use evtcr::{
    estimate_mean_capacity, estimate_outage_capacity, exact_mean_capacity, exact_outage_capacity, InterferenceGain,
    SimulationPlan, SystemParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Quadrature over the exact CDF of the selected SINR.
    Exact,
    /// Gumbel approximation with constants from the exact quantiles.
    Evt,
    Iplr,
    /// `ln(1 + c_p(Qḡ/h̄)N) + E₀` and its large-`N` outage form.
    IplrScaling,
    Tplr,
    TplrLow,
    Mc,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Exact,
        Method::Evt,
        Method::Iplr,
        Method::IplrScaling,
        Method::Tplr,
        Method::TplrLow,
        Method::Mc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Evt => "evt",
            Method::Iplr => "iplr",
            Method::IplrScaling => "iplr-scaling",
            Method::Tplr => "tplr",
            Method::TplrLow => "tplr-low",
            Method::Mc => "mc",
        }
    }

    pub fn uses_rng(self) -> bool {
        self == Method::Mc
    }

    fn regime(self) -> Option<RegimeFormulas> {
        match self {
            Method::Evt => Some(RegimeFormulas::Exact),
            Method::Iplr => Some(RegimeFormulas::Iplr),
            Method::Tplr => Some(RegimeFormulas::Tplr),
            Method::TplrLow => Some(RegimeFormulas::TplrLow),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL.into_iter().find(|m| m.as_str() == norm).ok_or_else(|| {
            let names: Vec<&str> = Method::ALL.iter().map(|m| m.as_str()).collect();
            format!("unknown method '{s}' (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Mean,
    Outage { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulation {
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub interference: InterferenceGain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Value {
    pub nats: f64,
    pub ci: Option<(f64, f64)>,
}

impl Value {
    fn point(nats: f64) -> Self {
        Self { nats, ci: None }
    }
}

pub fn evaluate(
    method: Method,
    params: &SystemParams,
    n_antennas: usize,
    metric: Metric,
    sim: &Simulation,
) -> evtcr::Result<Value> {
    if let Some(regime) = method.regime() {
        let v = match metric {
            Metric::Mean => regime_mean_capacity(regime, params, n_antennas)?,
            Metric::Outage { epsilon } => regime_outage_capacity(regime, params, n_antennas, epsilon)?,
        };
        return Ok(Value::point(v));
    }
    match method {
        Method::Exact => Ok(Value::point(match metric {
            Metric::Mean => exact_mean_capacity(params, n_antennas)?,
            Metric::Outage { epsilon } => exact_outage_capacity(params, n_antennas, epsilon)?,
        })),
        Method::IplrScaling => Ok(Value::point(match metric {
            Metric::Mean => iplr_mean_capacity(params, n_antennas)?,
            Metric::Outage { epsilon } => iplr_outage_capacity_large_n(params, n_antennas, epsilon)?,
        })),
        Method::Mc => {
            let plan = SimulationPlan::new(*params, n_antennas, sim.trials, sim.seed)
                .with_workers(sim.workers)
                .with_interference(sim.interference);
            let e = match metric {
                Metric::Mean => estimate_mean_capacity(&plan)?,
                Metric::Outage { epsilon } => estimate_outage_capacity(&plan, epsilon)?,
            };
            Ok(Value { nats: e.point, ci: Some((e.ci_low, e.ci_high)) })
        }
        _ => unreachable!("regime methods handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!("TPLR_LOW".parse::<Method>().unwrap(), Method::TplrLow);
        assert!("gumbel".parse::<Method>().unwrap_err().contains("unknown method"));
    }
}
