//! Link parameters, block-Rayleigh channel sampling, the secondary power rule
//! and transmit antenna selection. Everything here is linear scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Physical parameters of the spectrum-sharing link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Peak transmit power of the secondary transmitter.
    pub p_max: f64,
    /// Peak interference power tolerated at the primary receiver.
    pub q_limit: f64,
    /// Primary transmitter power.
    pub p_p: f64,
    /// Noise power at the secondary receiver.
    pub noise: f64,
    /// Mean gain, secondary transmitter to secondary receiver.
    pub mean_g: f64,
    /// Mean gain, secondary transmitter to primary receiver.
    pub mean_h: f64,
    /// Mean gain, primary transmitter to secondary receiver.
    pub mean_q: f64,
}

impl SystemParams {
    pub fn new(
        p_max: f64,
        q_limit: f64,
        p_p: f64,
        noise: f64,
        mean_g: f64,
        mean_h: f64,
        mean_q: f64,
    ) -> Result<Self> {
        let p = Self {
            p_max,
            q_limit,
            p_p,
            noise,
            mean_g,
            mean_h,
            mean_q,
        };
        p.validate()?;
        Ok(p)
    }

    /// Baseline setup used throughout the simulations: unit mean gains,
    /// σ² = 0.1 and P_max = P_p = Q = 1.
    pub fn baseline() -> Self {
        Self {
            p_max: 1.0,
            q_limit: 1.0,
            p_p: 1.0,
            noise: 0.1,
            mean_g: 1.0,
            mean_h: 1.0,
            mean_q: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_max", self.p_max),
            ("q_limit", self.q_limit),
            ("p_p", self.p_p),
            ("noise", self.noise),
            ("mean_g", self.mean_g),
            ("mean_h", self.mean_h),
            ("mean_q", self.mean_q),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParams {
                    name,
                    value,
                    reason: "must be strictly positive and finite",
                });
            }
        }
        Ok(())
    }

    /// `P_max·ḡ/σ²`, the mean received SNR at full power and the tail scale
    /// of the SINR distribution.
    pub fn snr_scale(&self) -> f64 {
        self.p_max * self.mean_g / self.noise
    }

    /// Mean PU interference power at the SR, `P_p·q̄`.
    pub fn mean_interference(&self) -> f64 {
        self.p_p * self.mean_q
    }

    /// `Q/P_max`.
    pub fn rho(&self) -> f64 {
        self.q_limit / self.p_max
    }

    /// Probability that the secondary transmitter runs at `P_max`,
    /// `c_q = 1 - e^{-ρ/h̄}`.
    pub fn c_q(&self) -> f64 {
        -(-self.rho() / self.mean_h).exp_m1()
    }
}

/// One block-fading realization of every channel power gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub q: f64,
}

impl ChannelDraw {
    pub fn n_antennas(&self) -> usize {
        self.g.len()
    }
}

/// Deterministic random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id mapped onto ChaCha's stream counter,
/// so distinct ids never overlap and a given pair replays bit-exactly on any
/// platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on (0, 1].
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    /// Exponential variate with the given mean, by inverse transform.
    pub fn exponential(&mut self, mean: f64) -> f64 {
        -mean * self.uniform_open0().ln()
    }
}

/// Draws `g_1..g_N`, `h_1..h_N` and then `q`, in that order.
pub fn sample_channel(
    params: &SystemParams,
    n_antennas: usize,
    rng: &mut RngStream,
) -> Result<ChannelDraw> {
    params.validate()?;
    let mut draw = ChannelDraw {
        g: Vec::with_capacity(n_antennas),
        h: Vec::with_capacity(n_antennas),
        q: 0.0,
    };
    sample_channel_into(params, n_antennas, rng, &mut draw)?;
    Ok(draw)
}

/// Same as [`sample_channel`] but reuses the buffers of `draw`.
pub fn sample_channel_into(
    params: &SystemParams,
    n_antennas: usize,
    rng: &mut RngStream,
    draw: &mut ChannelDraw,
) -> Result<()> {
    if n_antennas == 0 {
        return Err(Error::Domain {
            name: "n_antennas",
            value: 0.0,
            reason: "at least one antenna is required",
        });
    }
    draw.g.clear();
    draw.h.clear();
    draw.g.extend((0..n_antennas).map(|_| rng.exponential(params.mean_g)));
    draw.h.extend((0..n_antennas).map(|_| rng.exponential(params.mean_h)));
    draw.q = rng.exponential(params.mean_q);
    Ok(())
}

/// Transmit power `min{Q/h_i, P_max}` on an antenna with interference-link
/// gain `h_i`.
pub fn transmit_power(h_i: f64, params: &SystemParams) -> Result<f64> {
    if !(h_i > 0.0) {
        return Err(Error::Domain {
            name: "h_i",
            value: h_i,
            reason: "interference-link gain must be positive",
        });
    }
    Ok((params.q_limit / h_i).min(params.p_max))
}

/// Received SINR when transmitting on one antenna.
pub fn sinr(g_i: f64, h_i: f64, q: f64, params: &SystemParams) -> Result<f64> {
    if !(g_i > 0.0) {
        return Err(Error::Domain {
            name: "g_i",
            value: g_i,
            reason: "signal-link gain must be positive",
        });
    }
    if !(q >= 0.0) {
        return Err(Error::Domain {
            name: "q",
            value: q,
            reason: "primary-link gain must be non-negative",
        });
    }
    let ps = transmit_power(h_i, params)?;
    Ok(ps * g_i / (params.p_p * q + params.noise))
}

/// Antenna with the largest SINR and that SINR. Ties go to the lowest index.
pub fn best_antenna(draw: &ChannelDraw, params: &SystemParams) -> Result<(usize, f64)> {
    if draw.g.is_empty() || draw.g.len() != draw.h.len() {
        return Err(Error::Domain {
            name: "n_antennas",
            value: draw.g.len() as f64,
            reason: "draw must hold the same non-zero number of g and h gains",
        });
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (&g, &h)) in draw.g.iter().zip(&draw.h).enumerate() {
        let s = sinr(g, h, draw.q, params)?;
        if s > best.1 {
            best = (i, s);
        }
    }
    Ok(best)
}
