//! Exact distribution of the per-antenna SINR and of its maximum over `N`
//! antennas, numerical quantiles, and exact capacities by quadrature.

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::special::scaled_upper_incomplete_gamma_zero;

/// Bracketing and bisection settings for inverting the SINR CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_bracket_doublings: usize,
}

impl Default for QuantileSolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-12,
            max_bracket_doublings: 200,
        }
    }
}

impl QuantileSolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain {
                    name,
                    value,
                    reason: "solver tolerances must be positive",
                });
            }
        }
        Ok(())
    }
}

/// `1 - F_γ(x)`, evaluated directly from its two non-negative terms.
///
/// The `e^{A}·Γ(0, B)` factor is carried as `e^{A-B}·(e^{B}Γ(0, B))`; `A - B`
/// is never positive, so nothing overflows at small `x`.
pub fn sinr_ccdf(x: f64, params: &SystemParams) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain {
            name: "x",
            value: x,
            reason: "NaN SINR",
        });
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let SystemParams {
        p_max,
        q_limit,
        noise,
        mean_g,
        mean_h,
        ..
    } = *params;
    let ppq = params.mean_interference();
    let full_power = p_max * mean_g;
    let decay = x * noise / full_power;

    let lead = q_limit * mean_g / (x * ppq * mean_h);
    let b = (x / full_power + 1.0 / ppq) * (q_limit * mean_g / (x * mean_h) + noise);
    if !lead.is_finite() || !b.is_finite() {
        // x so small that the SINR is above it almost surely
        return Ok(1.0);
    }
    let limited = lead * (-decay - q_limit / (mean_h * p_max)).exp() * scaled_upper_incomplete_gamma_zero(b)?;
    let saturated = params.c_q() * full_power / (x * ppq + full_power) * (-decay).exp();
    Ok((limited + saturated).clamp(0.0, 1.0))
}

/// Per-antenna SINR CDF `F_γ(x)`; zero for `x <= 0`.
pub fn sinr_cdf(x: f64, params: &SystemParams) -> Result<f64> {
    Ok(1.0 - sinr_ccdf(x, params)?)
}

/// CDF of the selected-antenna SINR, `F_γ(x)^N`.
pub fn sinr_cdf_max(x: f64, params: &SystemParams, n_antennas: usize) -> Result<f64> {
    check_antennas(n_antennas)?;
    let s = sinr_ccdf(x, params)?;
    Ok((n_antennas as f64 * (-s).ln_1p()).exp())
}

/// `1 - F_γ(x)^N` without cancellation in the upper tail.
pub fn sinr_ccdf_max(x: f64, params: &SystemParams, n_antennas: usize) -> Result<f64> {
    check_antennas(n_antennas)?;
    let s = sinr_ccdf(x, params)?;
    if s >= 1.0 {
        return Ok(1.0);
    }
    Ok(-(n_antennas as f64 * (-s).ln_1p()).exp_m1())
}

fn check_antennas(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            name: "n_antennas",
            value: 0.0,
            reason: "at least one antenna is required",
        })
    } else {
        Ok(())
    }
}

/// `F_γ^{-1}(p)` for `0 < p < 1`.
///
/// For `p > 1/2` the search runs on the survival function against `1 - p`;
/// callers that know the tail mass exactly should use [`sinr_quantile_tail`].
pub fn sinr_quantile(p: f64, params: &SystemParams, cfg: &QuantileSolverConfig) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            reason: "quantile level must lie in (0, 1)",
        });
    }
    if p > 0.5 {
        sinr_quantile_tail(1.0 - p, params, cfg)
    } else {
        let x = bisect(p, params, cfg, |x| Ok(sinr_cdf(x, params)? - p))?;
        Ok(x)
    }
}

/// `F_γ^{-1}(1 - t)`: the SINR exceeded with probability `t`.
pub fn sinr_quantile_tail(t: f64, params: &SystemParams, cfg: &QuantileSolverConfig) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            reason: "tail probability must lie in (0, 1)",
        });
    }
    bisect(1.0 - t, params, cfg, |x| Ok(t - sinr_ccdf(x, params)?))
}

/// Geometric bracket growth from `Qḡ/h̄`, then bisection on `ln x`.
/// `g` must be increasing in `x` with a root at the requested level.
fn bisect<G>(p: f64, params: &SystemParams, cfg: &QuantileSolverConfig, g: G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    params.validate()?;
    let x0 = params.q_limit * params.mean_g / params.mean_h;
    let (mut lo, mut hi) = (x0, x0);
    let mut g_hi = g(hi)?;
    let mut doublings = 0;
    while g_hi < 0.0 {
        doublings += 1;
        if doublings > cfg.max_bracket_doublings {
            return Err(Error::BracketFailure { p, doublings });
        }
        lo = hi;
        hi *= 2.0;
        g_hi = g(hi)?;
    }
    let mut g_lo = g(lo)?;
    while g_lo >= 0.0 {
        doublings += 1;
        if doublings > cfg.max_bracket_doublings {
            return Err(Error::BracketFailure { p, doublings });
        }
        hi = lo;
        g_hi = g_lo;
        lo *= 0.5;
        g_lo = g(lo)?;
    }

    for _ in 0..4096 {
        if hi / lo - 1.0 <= cfg.rel_tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    let (x, resid) = if g_hi.abs() <= g_lo.abs() {
        (hi, g_hi)
    } else {
        (lo, g_lo)
    };
    if resid.abs() > cfg.abs_tol {
        return Err(Error::NonConvergence {
            what: "SINR quantile bisection",
            iterations: 4096,
        });
    }
    Ok(x)
}

/// Absolute tolerance of [`exact_mean_capacity`].
pub const CAPACITY_ABS_TOL: f64 = 1e-8;
/// Tail mass of `γ_max` beyond the quadrature cut-off.
const CAPACITY_TAIL_MASS: f64 = 1e-12;
const MAX_SUBINTERVALS: usize = 20_000;

/// `E[ln(1 + γ_max)] = ∫_0^∞ (1 - F_max(x))/(1 + x) dx` in nats/s/Hz.
pub fn exact_mean_capacity(params: &SystemParams, n_antennas: usize) -> Result<f64> {
    check_antennas(n_antennas)?;
    params.validate()?;
    let cfg = QuantileSolverConfig::default();
    let n = n_antennas as f64;
    // per-antenna tail mass t with 1 - (1 - t)^N = CAPACITY_TAIL_MASS
    let t_cut = -((-CAPACITY_TAIL_MASS).ln_1p() / n).exp_m1();
    let x_cut = sinr_quantile_tail(t_cut, params, &cfg)?;

    // the tail of 1 - F_max decays at least as fast as e^{-x/θ}
    let tail_bound = CAPACITY_TAIL_MASS * params.snr_scale() / (1.0 + x_cut);

    let integrand = |x: f64| -> Result<f64> { Ok(sinr_ccdf_max(x, params, n_antennas)? / (1.0 + x)) };
    let mut breaks = vec![0.0];
    let mut b = x_cut * 2f64.powi(-50);
    while b < x_cut {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(x_cut);
    let budget = (CAPACITY_ABS_TOL - tail_bound).max(0.5 * CAPACITY_ABS_TOL);
    let (value, _) = adaptive_gk15(&integrand, &breaks, budget)?;
    Ok(value)
}

/// Exact outage capacity: the largest `r` with `Pr{R_max < r} <= ε`,
/// i.e. `ln(1 + F_γ^{-1}(ε^{1/N}))`.
pub fn exact_outage_capacity(params: &SystemParams, n_antennas: usize, epsilon: f64) -> Result<f64> {
    check_antennas(n_antennas)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            reason: "outage probability must lie in (0, 1)",
        });
    }
    let t = -(epsilon.ln() / n_antennas as f64).exp_m1();
    let x = sinr_quantile_tail(t, params, &QuantileSolverConfig::default())?;
    Ok(x.ln_1p())
}

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
    })
}

/// Globally adaptive Gauss–Kronrod integration over consecutive breakpoints.
/// Returns `(value, error estimate)`.
pub(crate) fn adaptive_gk15<F>(f: &F, breaks: &[f64], abs_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut segs = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(f, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    loop {
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= abs_tol {
            // sum in breakpoint order so the result does not depend on refinement history
            segs.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = segs.iter().map(|s| s.value).sum();
            return Ok((value, err));
        }
        if segs.len() >= MAX_SUBINTERVALS {
            return Err(Error::NonConvergence {
                what: "adaptive Gauss-Kronrod quadrature",
                iterations: segs.len(),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("at least one segment");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::NonConvergence {
                what: "adaptive Gauss-Kronrod quadrature (interval underflow)",
                iterations: segs.len(),
            });
        }
        segs.push(gk15(f, s.a, mid)?);
        segs.push(gk15(f, mid, s.b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_limits_and_bounds() {
        let p = SystemParams::baseline();
        assert_eq!(sinr_cdf(0.0, &p).unwrap(), 0.0);
        assert_eq!(sinr_cdf(-3.0, &p).unwrap(), 0.0);
        assert!(sinr_cdf(1e-12, &p).unwrap() < 1e-9);
        assert!(sinr_ccdf(1e3, &p).unwrap() < 1e-30);
        assert_eq!(sinr_cdf(1e3, &p).unwrap(), 1.0);
        assert_eq!(sinr_cdf(f64::INFINITY, &p).unwrap(), 1.0);
        let mut prev = 0.0;
        for i in 0..400 {
            let x = 10f64.powf(-6.0 + 9.0 * i as f64 / 399.0);
            let f = sinr_cdf(x, &p).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn extreme_parameters_stay_finite() {
        // tiny PU interference pushes the e^{A} factor far past f64 range
        let p = SystemParams::new(1.0, 1.0, 1e-6, 0.1, 1.0, 1.0, 1e-3).unwrap();
        for &x in &[1e-9, 1e-3, 0.5, 5.0, 50.0] {
            let s = sinr_ccdf(x, &p).unwrap();
            assert!(s.is_finite() && (0.0..=1.0).contains(&s), "x={x}: {s}");
        }
    }

    #[test]
    fn max_cdf_is_power_of_single() {
        let p = SystemParams::baseline();
        for &x in &[0.3, 2.0, 9.0] {
            let f = sinr_cdf(x, &p).unwrap();
            assert!((sinr_cdf_max(x, &p, 1).unwrap() - f).abs() < 1e-15);
            assert!((sinr_cdf_max(x, &p, 7).unwrap() - f.powi(7)).abs() < 1e-13);
        }
        let median = sinr_quantile(0.5, &p, &QuantileSolverConfig::default()).unwrap();
        assert!((sinr_cdf_max(median, &p, 2).unwrap() - 0.25).abs() < 1e-11);
        assert!(sinr_cdf_max(1.0, &p, 0).is_err());
    }

    #[test]
    fn quantile_roundtrip_and_monotone() {
        let p = SystemParams::baseline();
        let cfg = QuantileSolverConfig::default();
        let x = sinr_quantile(0.9, &p, &cfg).unwrap();
        assert!((sinr_cdf(x, &p).unwrap() - 0.9).abs() < 1e-9);
        let mut prev = 0.0;
        for i in 1..100 {
            let level = i as f64 / 100.0;
            let q = sinr_quantile(level, &p, &cfg).unwrap();
            assert!((sinr_cdf(q, &p).unwrap() - level).abs() < 1e-9);
            assert!(q > prev);
            prev = q;
        }
        assert!(sinr_quantile(0.0, &p, &cfg).is_err());
        assert!(sinr_quantile(1.0, &p, &cfg).is_err());
    }

    #[test]
    fn quantile_tail_levels_for_large_n() {
        let p = SystemParams::baseline();
        let cfg = QuantileSolverConfig::default();
        for &n in &[2.0, 10.0, 100.0, 1e3, 1e4] {
            for t in [1.0 / n, 1.0 / (n * std::f64::consts::E)] {
                let x = sinr_quantile_tail(t, &p, &cfg).unwrap();
                assert!((sinr_ccdf(x, &p).unwrap() - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bracket_budget_surfaces_as_error() {
        let p = SystemParams::baseline();
        let cfg = QuantileSolverConfig {
            max_bracket_doublings: 1,
            ..Default::default()
        };
        assert!(matches!(
            sinr_quantile_tail(1e-12, &p, &cfg),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn quadrature_integrates_known_functions() {
        let f = |x: f64| Ok((-x).exp());
        let (v, _) = adaptive_gk15(&f, &[0.0, 1.0, 40.0], 1e-12).unwrap();
        assert!((v - (1.0 - (-40.0f64).exp())).abs() < 1e-12);
        let g = |x: f64| Ok(1.0 / (1.0 + x));
        let (v, _) = adaptive_gk15(&g, &[0.0, 1e3], 1e-10).unwrap();
        assert!((v - 1001f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn mean_capacity_positive_and_increasing_in_n() {
        let p = SystemParams::baseline();
        let mut prev = 0.0;
        for n in [1, 2, 4, 10, 20, 50] {
            let c = exact_mean_capacity(&p, n).unwrap();
            assert!(c > prev, "N={n}: {c} <= {prev}");
            prev = c;
        }
    }

    #[test]
    fn mean_capacity_increases_in_q_and_p_max() {
        let base = SystemParams::baseline();
        let mut prev_q = 0.0;
        let mut prev_p = 0.0;
        for db in [-10.0, -5.0, 0.0, 5.0, 10.0] {
            let lin = 10f64.powf(db / 10.0);
            let cq = exact_mean_capacity(&SystemParams { q_limit: lin, ..base }, 4).unwrap();
            let cp = exact_mean_capacity(&SystemParams { p_max: lin, ..base }, 4).unwrap();
            assert!(cq > prev_q && cp > prev_p);
            prev_q = cq;
            prev_p = cp;
        }
    }

    #[test]
    fn outage_capacity_inverts_max_cdf() {
        let p = SystemParams::baseline();
        for n in [1, 4, 20] {
            let r = exact_outage_capacity(&p, n, 0.1).unwrap();
            assert!((sinr_cdf_max(r.exp_m1(), &p, n).unwrap() - 0.1).abs() < 1e-9);
        }
    }
}
