//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use evtcr::InterferenceGain;

use crate::error::CliError;
use crate::method::{Method, Metric};
use crate::params::{ParamInputs, Power, Ratio, Unit};

pub const DEFAULT_TRIALS: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output: Option<PathBuf>,
    #[serde(default)]
    methods: Vec<String>,
    metric: Option<String>,
    epsilon: Option<f64>,
    params: RawParams,
    sweep: Option<RawSweep>,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    verify: RawVerify,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    unit: Option<String>,
    p_max: Option<f64>,
    q_limit: Option<f64>,
    p_p: Option<f64>,
    noise: Option<f64>,
    mean_g: Option<f64>,
    mean_h: Option<f64>,
    mean_q: Option<f64>,
    inr: Option<f64>,
    sir_q: Option<f64>,
    sir_p: Option<f64>,
    snr_q: Option<f64>,
    snr_p: Option<f64>,
    pqr: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    values: Option<Vec<f64>>,
    n_antennas: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    trials: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    interference: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    mode: Option<String>,
    grid_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    QLimit,
    PMax,
    N,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::QLimit => "q_limit",
            SweepVariable::PMax => "p_max",
            SweepVariable::N => "n",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    /// Values in the config's unit (antenna counts for `n`).
    pub values: Vec<f64>,
    /// Antenna counts evaluated at each point; empty when sweeping `n`.
    pub n_antennas: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Sinr,
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSettings {
    pub trials: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub interference: InterferenceGain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub unit: Unit,
    pub inputs: ParamInputs,
    pub sweep: Option<Sweep>,
    pub methods: Vec<Method>,
    pub metric: Metric,
    pub simulation: SimulationSettings,
    pub output: Option<PathBuf>,
    pub verify_mode: VerifyMode,
    pub verify_grid_points: usize,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse(&text).map_err(|message| CliError::Config { path: path.to_path_buf(), message })
}

pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;

    let unit = match raw.params.unit.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("db") => Unit::Db,
        Some("linear") => Unit::Linear,
        Some(other) => return Err(format!("params.unit: expected \"db\" or \"linear\", got \"{other}\"")),
    };
    let inputs = param_inputs(&raw.params, unit)?;

    let sweep = raw.sweep.map(|s| sweep(s, &inputs)).transpose()?;

    let methods = raw
        .methods
        .iter()
        .map(|m| m.parse::<Method>().map_err(|e| format!("methods: {e}")))
        .collect::<Result<Vec<_>, _>>()?;

    let epsilon = raw.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(format!("epsilon: must lie in (0, 1), got {epsilon}"));
    }
    let metric = match raw.metric.as_deref() {
        None | Some("mean") => Metric::Mean,
        Some("outage") => Metric::Outage { epsilon },
        Some(other) => return Err(format!("metric: expected \"mean\" or \"outage\", got \"{other}\"")),
    };

    let interference = match raw.simulation.interference.as_deref() {
        None | Some("independent") => InterferenceGain::Independent,
        Some("shared") => InterferenceGain::Shared,
        Some(other) => {
            return Err(format!(
                "simulation.interference: expected \"independent\" or \"shared\", got \"{other}\""
            ))
        }
    };
    let simulation = SimulationSettings {
        trials: raw.simulation.trials.unwrap_or(DEFAULT_TRIALS),
        seed: raw.simulation.seed.unwrap_or(DEFAULT_SEED),
        workers: raw.simulation.workers,
        interference,
    };
    if simulation.trials == 0 || simulation.workers == Some(0) {
        return Err("simulation: trials and workers must be positive".into());
    }

    let verify_mode = match raw.verify.mode.as_deref() {
        None | Some("sinr") => VerifyMode::Sinr,
        Some("exponential") => VerifyMode::Exponential,
        Some(other) => return Err(format!("verify.mode: expected \"sinr\" or \"exponential\", got \"{other}\"")),
    };
    let verify_grid_points = raw.verify.grid_points.unwrap_or(400);
    if verify_grid_points < 3 {
        return Err("verify.grid_points: need at least 3 points".into());
    }

    Ok(ExperimentConfig {
        unit,
        inputs,
        sweep,
        methods,
        metric,
        simulation,
        output: raw.output,
        verify_mode,
        verify_grid_points,
    })
}

fn param_inputs(p: &RawParams, unit: Unit) -> Result<ParamInputs, String> {
    let conv = |name: &str, v: Option<f64>| -> Result<Option<f64>, String> {
        match v {
            Some(x) if !x.is_finite() => Err(format!("params.{name}: value must be finite")),
            Some(x) => Ok(Some(unit.to_linear(x))),
            None => Ok(None),
        }
    };
    let mut ratios = Vec::new();
    let given = [p.inr, p.sir_q, p.sir_p, p.snr_q, p.snr_p, p.pqr];
    for (ratio, v) in Ratio::ALL.into_iter().zip(given) {
        if let Some(v) = conv(ratio.key(), v)? {
            ratios.push((ratio, v));
        }
    }
    Ok(ParamInputs {
        p_max: conv("p_max", p.p_max)?,
        q_limit: conv("q_limit", p.q_limit)?,
        p_p: conv("p_p", p.p_p)?,
        noise: conv("noise", p.noise)?,
        mean_g: conv("mean_g", p.mean_g)?,
        mean_h: conv("mean_h", p.mean_h)?,
        mean_q: conv("mean_q", p.mean_q)?,
        ratios,
    })
}

fn sweep(s: RawSweep, inputs: &ParamInputs) -> Result<Sweep, String> {
    let variable = match s.variable.to_ascii_lowercase().as_str() {
        "q_limit" | "q" => SweepVariable::QLimit,
        "p_max" => SweepVariable::PMax,
        "n" | "n_antennas" => SweepVariable::N,
        other => return Err(format!("sweep.variable: expected q_limit, p_max or n, got \"{other}\"")),
    };
    let values = match (s.values, s.start, s.stop, s.steps) {
        (Some(v), None, None, None) => v,
        (None, Some(start), Some(stop), Some(steps)) => {
            if steps < 2 {
                return Err(format!("sweep.steps: need at least 2, got {steps}"));
            }
            (0..steps)
                .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
                .collect()
        }
        _ => return Err("sweep: give either `values` or all of `start`, `stop`, `steps`".into()),
    };
    if values.len() < 2 {
        return Err("sweep: need at least 2 points".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("sweep: values must be finite".into());
    }

    let n_antennas = match variable {
        SweepVariable::N => {
            if s.n_antennas.is_some() {
                return Err("sweep.n_antennas: not allowed when sweeping n".into());
            }
            if values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                return Err("sweep: antenna counts must be positive integers".into());
            }
            Vec::new()
        }
        SweepVariable::QLimit | SweepVariable::PMax => {
            let n = s.n_antennas.ok_or("sweep.n_antennas: required unless sweeping n")?;
            if n.is_empty() || n.contains(&0) {
                return Err("sweep.n_antennas: need one or more positive counts".into());
            }
            let (power, taken) = match variable {
                SweepVariable::QLimit => (Power::QLimit, inputs.q_limit),
                _ => (Power::PMax, inputs.p_max),
            };
            if taken.is_some() {
                return Err(format!("params.{}: also the sweep variable; remove one of them", power.key()));
            }
            n
        }
    };
    Ok(Sweep { variable, values, n_antennas })
}
