//! `evtcr`: parameter sweeps, tail checks and single-point capacity queries.

mod config;
mod error;
mod experiment;
mod format;
mod method;
mod params;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evtcr::units::{db_to_linear, nats_to_bits};
use evtcr::InterferenceGain;

use crate::config::{DEFAULT_SEED, DEFAULT_TRIALS};
use crate::error::CliError;
use crate::format::sig12;
use crate::method::{evaluate, Method, Metric, Simulation};
use crate::params::{ParamInputs, Ratio};

/// Below this the Monte Carlo intervals are too wide to be useful.
const LOW_TRIALS_WARNING: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "evtcr", version, about = "Capacity of a spectrum-sharing link with transmit antenna selection")]
struct Cli {
    /// Monte Carlo seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point (overrides the config).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads for Monte Carlo; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output path for `run` (overrides the config; stdout if neither is set).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every configured method over a sweep and write CSV.
    Run { config: PathBuf },
    /// Check the Gumbel domain-of-attraction tail conditions.
    Verify { config: PathBuf },
    /// Print one capacity value in nats/s/Hz and bits/s/Hz.
    Point(PointArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Number of transmit antennas.
    #[arg(long = "n")]
    n: usize,
    /// exact, evt, iplr, iplr-scaling, tplr, tplr-low or mc.
    #[arg(long)]
    method: Method,
    /// Outage probability; without it the mean capacity is reported.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Use one PU interference gain for all antennas in Monte Carlo.
    #[arg(long)]
    shared_interference: bool,

    #[arg(long, conflicts_with = "p_max_db")]
    p_max: Option<f64>,
    #[arg(long)]
    p_max_db: Option<f64>,
    #[arg(long, conflicts_with = "q_limit_db")]
    q_limit: Option<f64>,
    #[arg(long)]
    q_limit_db: Option<f64>,
    #[arg(long, conflicts_with = "p_p_db")]
    p_p: Option<f64>,
    #[arg(long)]
    p_p_db: Option<f64>,
    #[arg(long, conflicts_with = "noise_db")]
    noise: Option<f64>,
    #[arg(long)]
    noise_db: Option<f64>,
    #[arg(long, conflicts_with = "mean_g_db")]
    mean_g: Option<f64>,
    #[arg(long)]
    mean_g_db: Option<f64>,
    #[arg(long, conflicts_with = "mean_h_db")]
    mean_h: Option<f64>,
    #[arg(long)]
    mean_h_db: Option<f64>,
    #[arg(long, conflicts_with = "mean_q_db")]
    mean_q: Option<f64>,
    #[arg(long)]
    mean_q_db: Option<f64>,

    /// P_p / noise, in dB.
    #[arg(long)]
    inr_db: Option<f64>,
    /// Q / P_p, in dB.
    #[arg(long)]
    sir_q_db: Option<f64>,
    /// P_max / P_p, in dB.
    #[arg(long)]
    sir_p_db: Option<f64>,
    /// Q / noise, in dB.
    #[arg(long)]
    snr_q_db: Option<f64>,
    /// P_max / noise, in dB.
    #[arg(long)]
    snr_p_db: Option<f64>,
    /// P_max / Q, in dB.
    #[arg(long)]
    pqr_db: Option<f64>,
}

impl PointArgs {
    fn inputs(&self) -> ParamInputs {
        let pick = |lin: Option<f64>, db: Option<f64>| lin.or(db.map(db_to_linear));
        let ratios = [self.inr_db, self.sir_q_db, self.sir_p_db, self.snr_q_db, self.snr_p_db, self.pqr_db];
        ParamInputs {
            p_max: pick(self.p_max, self.p_max_db),
            q_limit: pick(self.q_limit, self.q_limit_db),
            p_p: pick(self.p_p, self.p_p_db),
            noise: pick(self.noise, self.noise_db),
            mean_g: pick(self.mean_g, self.mean_g_db),
            mean_h: pick(self.mean_h, self.mean_h_db),
            mean_q: pick(self.mean_q, self.mean_q_db),
            ratios: Ratio::ALL
                .into_iter()
                .zip(ratios)
                .filter_map(|(r, v)| v.map(|db| (r, db_to_linear(db))))
                .collect(),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn warn_low_trials(trials: usize) {
    if trials < LOW_TRIALS_WARNING {
        eprintln!("warning: {trials} Monte Carlo trials is below {LOW_TRIALS_WARNING}; intervals will be wide");
    }
}

fn run_command(cli: &Cli, path: &PathBuf) -> Result<(), CliError> {
    let mut cfg = config::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.simulation.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.simulation.trials = trials;
    }
    if cfg.methods.iter().any(|m| m.uses_rng()) {
        warn_low_trials(cfg.simulation.trials);
    }
    let workers = cli.workers.or(cfg.simulation.workers).unwrap_or_else(default_workers);

    let summary = match cli.out.as_ref().or(cfg.output.as_ref()) {
        Some(out) => {
            let file = File::create(out).map_err(|source| CliError::Io { path: out.clone(), source })?;
            experiment::run(&cfg, workers, BufWriter::new(file))?
        }
        None => experiment::run(&cfg, workers, io::stdout().lock())?,
    };
    if summary.out_of_regime > 0 {
        eprintln!("note: {} of {} rows are outside their regime's validity", summary.out_of_regime, summary.rows);
    }
    if summary.failed > 0 {
        return Err(CliError::Verification(format!(
            "{} of {} rows failed numerically; see the reason column",
            summary.failed, summary.rows
        )));
    }
    Ok(())
}

fn verify_command(path: &PathBuf) -> Result<(), CliError> {
    let cfg = config::load(path)?;
    let (report, ok) = experiment::verify(&cfg)?;
    print!("{report}");
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification("tail conditions not met".into()))
    }
}

fn point_command(cli: &Cli, args: &PointArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let params = args.inputs().resolve()?;
    let metric = match args.epsilon {
        None => Metric::Mean,
        Some(e) if e > 0.0 && e < 1.0 => Metric::Outage { epsilon: e },
        Some(e) => return Err(CliError::Usage(format!("--epsilon must lie in (0, 1), got {e}"))),
    };
    let sim = Simulation {
        trials: cli.trials.unwrap_or(DEFAULT_TRIALS),
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        workers: cli.workers.unwrap_or_else(default_workers),
        interference: if args.shared_interference { InterferenceGain::Shared } else { InterferenceGain::Independent },
    };
    if args.method.uses_rng() {
        warn_low_trials(sim.trials);
    }
    let v = evaluate(args.method, &params, args.n, metric, &sim)?;

    let mut out = io::stdout().lock();
    let line = |out: &mut io::StdoutLock, s: String| {
        writeln!(out, "{s}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
    };
    line(&mut out, format!("{} {}, N = {}", args.method, experiment::metric_label(metric), args.n))?;
    line(&mut out, format!("{} nats/s/Hz", sig12(v.nats)))?;
    line(&mut out, format!("{} bits/s/Hz", sig12(nats_to_bits(v.nats))))?;
    if let Some((lo, hi)) = v.ci {
        line(&mut out, format!("99% interval [{}, {}] nats/s/Hz", sig12(lo), sig12(hi)))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run_command(&cli, config),
        Command::Verify { config } => verify_command(config),
        Command::Point(args) => point_command(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
