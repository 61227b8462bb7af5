//! Monte Carlo ground truth for the selected-antenna SINR and rate.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS`]; block `b` draws from
//! `RngStream::new(seed, b)`. Blocks run on a rayon pool of `workers` threads
//! and their summaries are reduced in block order, so every estimate is
//! bit-identical for a given plan whatever the worker count.
//!
//! The order-statistic CDF `F_γ(x)^N` treats the per-antenna SINRs as i.i.d.
//! That only holds if each antenna sees its own PU interference gain, so
//! [`InterferenceGain::Independent`] is the default. With a single gain
//! shared by all antennas ([`InterferenceGain::Shared`]) the SINRs are
//! correlated and the simulated capacities fall below the i.i.d. analysis.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{sample_channel_into, ChannelDraw, RngStream, SystemParams};
use crate::error::{Error, Result};

pub const BLOCK_TRIALS: usize = 1 << 16;
pub const MIN_MEAN_TRIALS: usize = 100;
/// Below this many trials the normal-approximation interval is unreliable.
pub const NORMAL_CI_MIN_TRIALS: usize = 10_000;

/// How the PT→SR gain `q` is drawn within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceGain {
    /// One `(g_i, h_i, q_i)` draw per antenna: i.i.d. per-antenna SINRs.
    #[default]
    Independent,
    /// One `q` for all antennas of a trial.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationPlan {
    pub params: SystemParams,
    pub n_antennas: usize,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    /// Two-sided confidence level of reported intervals.
    pub confidence: f64,
    pub interference: InterferenceGain,
}

impl SimulationPlan {
    pub fn new(params: SystemParams, n_antennas: usize, trials: usize, seed: u64) -> Self {
        Self {
            params,
            n_antennas,
            trials,
            seed,
            workers: 1,
            confidence: 0.99,
            interference: InterferenceGain::Independent,
        }
    }

    pub fn with_interference(mut self, interference: InterferenceGain) -> Self {
        self.interference = interference;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |name, value: f64, reason| Err(Error::Domain { name, value, reason });
        if self.n_antennas == 0 {
            return bad("n_antennas", 0.0, "at least one antenna is required");
        }
        if self.trials == 0 {
            return bad("trials", 0.0, "at least one trial is required");
        }
        if self.workers == 0 {
            return bad("workers", 0.0, "at least one worker is required");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad("confidence", self.confidence, "confidence must lie in (0, 1)");
        }
        Ok(())
    }

    fn blocks(&self) -> impl IndexedParallelIterator<Item = (u64, usize)> + '_ {
        let n_blocks = self.trials.div_ceil(BLOCK_TRIALS);
        (0..n_blocks).into_par_iter().map(move |b| {
            let len = BLOCK_TRIALS.min(self.trials - b * BLOCK_TRIALS);
            (b as u64, len)
        })
    }

    /// Runs `f` on every block and returns the results in block order.
    fn run_blocks<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(RngStream, usize) -> Result<T> + Sync + Send,
    {
        self.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|_| Error::Domain {
                name: "workers",
                value: self.workers as f64,
                reason: "could not start the worker pool",
            })?;
        pool.install(|| {
            self.blocks()
                .map(|(b, len)| f(RngStream::new(self.seed, b), len))
                .collect::<Result<Vec<T>>>()
        })
    }
}

/// Monte Carlo point estimate with a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub trials: usize,
}

impl CapacityEstimate {
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

/// Per-trial sampler holding the draw buffer.
struct TrialSampler {
    params: SystemParams,
    n_antennas: usize,
    interference: InterferenceGain,
    draw: ChannelDraw,
}

impl TrialSampler {
    fn new(plan: &SimulationPlan) -> Self {
        Self {
            params: plan.params,
            n_antennas: plan.n_antennas,
            interference: plan.interference,
            draw: ChannelDraw {
                g: Vec::with_capacity(plan.n_antennas),
                h: Vec::with_capacity(plan.n_antennas),
                q: 0.0,
            },
        }
    }

    /// Calls `f` with the SINR of every antenna of one trial, in antenna order.
    fn trial(&mut self, rng: &mut RngStream, mut f: impl FnMut(f64)) -> Result<()> {
        let p = &self.params;
        match self.interference {
            InterferenceGain::Shared => {
                sample_channel_into(p, self.n_antennas, rng, &mut self.draw)?;
                let denom = p.p_p * self.draw.q + p.noise;
                for (&g, &h) in self.draw.g.iter().zip(&self.draw.h) {
                    f(link_sinr(p, g, h, denom));
                }
            }
            InterferenceGain::Independent => {
                for _ in 0..self.n_antennas {
                    sample_channel_into(p, 1, rng, &mut self.draw)?;
                    let denom = p.p_p * self.draw.q + p.noise;
                    f(link_sinr(p, self.draw.g[0], self.draw.h[0], denom));
                }
            }
        }
        Ok(())
    }

    fn max_sinr(&mut self, rng: &mut RngStream) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        self.trial(rng, |s| best = best.max(s))?;
        Ok(best)
    }
}

// h = 0 has probability ~2^-53 per draw; Q/0 = inf falls to the P_max branch
#[inline]
fn link_sinr(p: &SystemParams, g: f64, h: f64, denom: f64) -> f64 {
    (p.q_limit / h).min(p.p_max) * g / denom
}

/// `γ_max` for every trial, in trial order.
pub fn max_sinr_samples(plan: &SimulationPlan) -> Result<Vec<f64>> {
    let blocks = plan.run_blocks(|mut rng, len| {
        let mut sampler = TrialSampler::new(plan);
        (0..len).map(|_| sampler.max_sinr(&mut rng)).collect::<Result<Vec<_>>>()
    })?;
    Ok(blocks.concat())
}

/// `R_max = ln(1 + γ_max)` for every trial, in trial order.
pub fn max_rate_samples(plan: &SimulationPlan) -> Result<Vec<f64>> {
    let mut s = max_sinr_samples(plan)?;
    s.iter_mut().for_each(|x| *x = x.ln_1p());
    Ok(s)
}

/// SINR of every antenna of every trial (`trials·N` values); each is a draw
/// from the per-antenna distribution.
pub fn per_antenna_sinr_samples(plan: &SimulationPlan) -> Result<Vec<f64>> {
    let blocks = plan.run_blocks(|mut rng, len| {
        let mut sampler = TrialSampler::new(plan);
        let mut out = Vec::with_capacity(len * plan.n_antennas);
        for _ in 0..len {
            sampler.trial(&mut rng, |s| out.push(s))?;
        }
        Ok(out)
    })?;
    Ok(blocks.concat())
}

/// Streaming mean/variance summary (Welford), combined with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

fn two_sided_z(confidence: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * confidence)
}

/// Sample mean of `ln(1 + γ_max)` with a normal-approximation interval.
pub fn estimate_mean_capacity(plan: &SimulationPlan) -> Result<CapacityEstimate> {
    if plan.trials < MIN_MEAN_TRIALS {
        return Err(Error::Domain {
            name: "trials",
            value: plan.trials as f64,
            reason: "mean-capacity estimation needs at least 100 trials",
        });
    }
    let blocks = plan.run_blocks(|mut rng, len| {
        let mut sampler = TrialSampler::new(plan);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sampler.max_sinr(&mut rng)?.ln_1p());
        }
        Ok(m)
    })?;
    let m = blocks.into_iter().fold(Moments::default(), Moments::merge);
    let sd = (m.m2 / (m.count - 1.0)).sqrt();
    let half = two_sided_z(plan.confidence) * sd / m.count.sqrt();
    Ok(CapacityEstimate {
        point: m.mean,
        ci_low: m.mean - half,
        ci_high: m.mean + half,
        confidence: plan.confidence,
        trials: plan.trials,
    })
}

/// Empirical `ε`-quantile of `R_max` (lower order statistic) with a
/// binomial order-statistic interval.
pub fn estimate_outage_capacity(plan: &SimulationPlan, epsilon: f64) -> Result<CapacityEstimate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            reason: "outage probability must lie in (0, 1)",
        });
    }
    if (plan.trials as f64) * epsilon.min(1.0 - epsilon) < 50.0 {
        return Err(Error::InsufficientTrials {
            trials: plan.trials,
            epsilon,
        });
    }
    let mut samples = max_rate_samples(plan)?;
    samples.sort_unstable_by(f64::total_cmp);
    outage_from_sorted(&samples, epsilon, plan.confidence)
}

/// Outage estimate from already sorted `R_max` samples.
pub fn outage_from_sorted(sorted: &[f64], epsilon: f64, confidence: f64) -> Result<CapacityEstimate> {
    let point = lower_order_statistic(sorted, epsilon)?;
    let n = sorted.len() as f64;
    let centre = n * epsilon;
    let half = two_sided_z(confidence) * (n * epsilon * (1.0 - epsilon)).sqrt();
    let lo = ((centre - half).floor() as usize).clamp(1, sorted.len());
    let hi = ((centre + half).ceil() as usize).clamp(1, sorted.len());
    Ok(CapacityEstimate {
        point,
        ci_low: sorted[lo - 1].min(point),
        ci_high: sorted[hi - 1].max(point),
        confidence,
        trials: sorted.len(),
    })
}

/// The `⌈ε·n⌉`-th smallest sample (1-based) of sorted data.
pub fn lower_order_statistic(sorted: &[f64], epsilon: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientTrials { trials: 0, epsilon });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            reason: "outage probability must lie in (0, 1)",
        });
    }
    let k = ((epsilon * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[k - 1])
}

/// Right-continuous empirical CDF of `samples` evaluated on `x_grid`.
pub fn empirical_cdf(samples: &[f64], x_grid: &[f64]) -> Vec<f64> {
    if samples.is_empty() {
        return vec![0.0; x_grid.len()];
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    x_grid
        .iter()
        .map(|&x| sorted.partition_point(|&s| s <= x) as f64 / n)
        .collect()
}

/// Half-width of the Dvoretzky–Kiefer–Wolfowitz band for `n` samples at
/// confidence `1 - alpha`.
pub fn dkw_half_width(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}
