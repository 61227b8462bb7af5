//! Scalar special functions used by the closed-form capacity expressions.
//!
//! Two functions are needed: the upper incomplete gamma function at order
//! zero, `Γ(0, x) = ∫_x^∞ e^{-t}/t dt` (the exponential integral `E₁`), and
//! the principal branch of the Lambert W function.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

// 1/e split into a double and its rounding error
const INV_E: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;

// Series of W0 about the branch point in p = sqrt(2(e·x + 1)).
const BRANCH_SERIES: [f64; 10] = [
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680_863.0 / 43_545_600.0,
    -1963.0 / 204_120.0,
    226_287_557.0 / 37_623_398_400.0,
];

/// Iteration control for the series and continued-fraction evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            abs_tol: f64::EPSILON,
            max_iter: 200,
        }
    }
}

impl Accuracy {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::Domain {
                name: "abs_tol",
                value: abs_tol,
                reason: "must be positive and finite",
            });
        }
        if max_iter == 0 {
            return Err(Error::Domain {
                name: "max_iter",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self { abs_tol, max_iter })
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            reason: "incomplete gamma at order zero requires 0 < x < inf",
        })
    }
}

/// Power series `-γ - ln x + Σ (-1)^{k+1} x^k / (k·k!)`; used for `x < 1`.
fn e1_series(x: f64, acc: &Accuracy) -> Result<f64> {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..=acc.max_iter {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = -term / kf;
        sum += contrib;
        if contrib.abs() <= acc.abs_tol * sum.abs().max(1.0) {
            return Ok(-EULER_GAMMA - x.ln() + sum);
        }
    }
    Err(Error::NonConvergence {
        what: "E1 power series",
        iterations: acc.max_iter,
    })
}

/// Modified Lentz evaluation of the continued fraction for `e^x·E₁(x)`;
/// used for `x >= 1`.
fn scaled_e1_cf(x: f64, acc: &Accuracy) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=acc.max_iter {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= acc.abs_tol {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        what: "E1 continued fraction",
        iterations: acc.max_iter,
    })
}

/// `Γ(0, x)` for `x > 0`.
pub fn upper_incomplete_gamma_zero(x: f64) -> Result<f64> {
    upper_incomplete_gamma_zero_with(x, &Accuracy::default())
}

pub fn upper_incomplete_gamma_zero_with(x: f64, acc: &Accuracy) -> Result<f64> {
    check_positive(x)?;
    if x < 1.0 {
        e1_series(x, acc)
    } else {
        Ok(scaled_e1_cf(x, acc)? * (-x).exp())
    }
}

/// `e^x·Γ(0, x)`, finite for every `x > 0` even where `e^x` alone overflows.
///
/// This is the product that appears in the per-antenna SINR distribution and
/// in the interference-limited constant `c_p`.
pub fn scaled_upper_incomplete_gamma_zero(x: f64) -> Result<f64> {
    let acc = Accuracy::default();
    check_positive(x)?;
    if x < 1.0 {
        Ok(x.exp() * e1_series(x, &acc)?)
    } else {
        scaled_e1_cf(x, &acc)
    }
}

/// `ln Γ(0, x)`, computed without forming `e^{-x}` for large `x`.
pub fn ln_upper_incomplete_gamma_zero(x: f64) -> Result<f64> {
    let acc = Accuracy::default();
    check_positive(x)?;
    if x < 1.0 {
        Ok(e1_series(x, &acc)?.ln())
    } else {
        Ok(scaled_e1_cf(x, &acc)?.ln() - x)
    }
}

/// Principal branch `W₀(x)` of the Lambert W function, `x >= -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E {
        return Err(Error::Domain {
            name: "x",
            value: x,
            reason: "Lambert W0 requires x >= -1/e",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // distance to the branch point; x + INV_E is exact near -1/e
    let q = (x + INV_E) + INV_E_LO;
    if q <= 0.0 {
        return Ok(-1.0);
    }
    let p = (2.0 * std::f64::consts::E * q).sqrt();
    if q < 1e-4 {
        // p < 0.025: truncation error below 1e-16, and Halley would be
        // limited by the cancellation in w·e^w - x
        return Ok(BRANCH_SERIES.iter().rev().fold(0.0, |acc, &c| acc * p + c));
    }
    let mut w = if x < -0.25 {
        BRANCH_SERIES[..5].iter().rev().fold(0.0, |acc, &c| acc * p + c)
    } else {
        x.ln_1p()
    };
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 2.0 * f64::EPSILON * x.abs() {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence {
        what: "Lambert W0 Halley iteration",
        iterations: 50,
    })
}

/// `W₀(e^l)` for arguments whose exponential overflows; solves
/// `w + ln w = l` by Newton's method.
pub fn lambert_w0_of_exp(l: f64) -> Result<f64> {
    if l.is_nan() {
        return Err(Error::Domain {
            name: "l",
            value: l,
            reason: "NaN argument",
        });
    }
    if l < 1.0 {
        return lambert_w0(l.exp());
    }
    let mut w = l - l.ln() + l.ln() / l;
    for _ in 0..50 {
        let g = w + w.ln() - l;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence {
        what: "Lambert W0 of exp",
        iterations: 50,
    })
}
