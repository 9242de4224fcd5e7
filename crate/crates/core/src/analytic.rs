//! Closed-form sensing metrics.
//!
//! Detection probabilities use the Gaussian (CLT) approximation of the summed
//! fading gains. Two orientations are available: [`FormulaMode::Physical`]
//! returns `Pr(statistic > y_th)`, while [`FormulaMode::PaperLiteral`]
//! returns the lower-tail form `(1 + erf(z)) / 2` and the literal-mode
//! throughput expressions term for term, including their `alpha * erf(z)`
//! activity term. The literal throughput expressions are not probabilities
//! in general and can go negative for thresholds below the CLT mean.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_unit, ChannelParams, RisConfigKind, SecondaryNetParams, SensingParams};
use crate::specfun::{erf, erfc, inv_erfc};

/// Below this many reflectors the Gaussian approximation is visibly off.
pub const CLT_ADVISORY_MIN_REFLECTORS: u32 = 8;

/// Rounding slack tolerated before a probability is treated as out of range.
const PROBABILITY_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormulaMode {
    Physical,
    PaperLiteral,
}

impl FormulaMode {
    pub const ALL: [FormulaMode; 2] = [FormulaMode::Physical, FormulaMode::PaperLiteral];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaMode::Physical => "physical",
            FormulaMode::PaperLiteral => "paper-literal",
        }
    }
}

impl fmt::Display for FormulaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "physical" => Ok(FormulaMode::Physical),
            "paper-literal" | "paper_literal" | "literal" => Ok(FormulaMode::PaperLiteral),
            other => Err(Error::Config(format!(
                "unknown formula mode `{other}` (expected `physical` or `paper-literal`)"
            ))),
        }
    }
}

/// Mean and variance of the Gaussian standing in for the summed gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltMoments {
    pub mu: f64,
    pub sigma2: f64,
}

/// Physical-orientation metrics for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricBundle {
    pub p_f: f64,
    pub p_d: f64,
    pub p_m: f64,
    pub p_t: f64,
    pub throughput: f64,
    /// Throughput in the limit `p_f -> 0`: `lambda R_s (1 - alpha + alpha p_m)`.
    pub throughput_asym: f64,
}

/// Accepts values within rounding slack of `[0, 1]`; anything further out is
/// a formula error and is reported.
pub(crate) fn clamp_probability(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if (-PROBABILITY_SLACK..0.0).contains(&value) {
        Ok(0.0)
    } else if value > 1.0 && value <= 1.0 + PROBABILITY_SLACK {
        Ok(1.0)
    } else {
        Err(Error::Numeric(format!(
            "{what} = {value} is outside [0, 1]"
        )))
    }
}

fn check_noise(n0: f64) -> Result<()> {
    if n0 > 0.0 && n0.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("n0", n0, "must be positive and finite"))
    }
}

fn check_threshold(y_th: f64) -> Result<()> {
    if y_th >= 0.0 && y_th.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("y_th", y_th, "must be finite and >= 0"))
    }
}

/// `erfc(sqrt(y_th / (2 n0)))`, exact for the chi-square noise energy.
pub fn p_false_alarm(y_th: f64, n0: f64) -> Result<f64> {
    check_threshold(y_th)?;
    check_noise(n0)?;
    Ok(erfc((y_th / (2.0 * n0)).sqrt()))
}

/// `erf(sqrt(y_th / (2 n0)))`, i.e. `1 - p_f` without the subtraction.
fn p_no_false_alarm(y_th: f64, n0: f64) -> f64 {
    erf((y_th / (2.0 * n0)).sqrt())
}

pub fn clt_moments(n_reflectors: u32, kind: RisConfigKind) -> CltMoments {
    let n = f64::from(n_reflectors);
    match kind {
        RisConfigKind::AccessPoint => CltMoments {
            mu: n * (PI / 2.0).sqrt(),
            sigma2: n * (2.0 - PI / 2.0),
        },
        RisConfigKind::Relay => CltMoments {
            mu: n * PI / 2.0,
            sigma2: n * (4.0 - PI * PI / 4.0),
        },
    }
}

/// Threshold expressed on the scale of the summed gains.
pub fn normalized_threshold(params: &ChannelParams, y_th: f64, kind: RisConfigKind) -> Result<f64> {
    params.validate()?;
    check_threshold(y_th)?;
    Ok(y_th / params.statistic_scale(kind))
}

/// `(Theta - mu) / sqrt(2 sigma^2)`, the argument of every detection erf.
pub fn detection_argument(params: &ChannelParams, y_th: f64, kind: RisConfigKind) -> Result<f64> {
    let theta = normalized_threshold(params, y_th, kind)?;
    let m = clt_moments(params.n_reflectors, kind);
    Ok((theta - m.mu) / (2.0 * m.sigma2).sqrt())
}

/// Inverse of [`detection_argument`] in `y_th`.
pub fn threshold_for_argument(params: &ChannelParams, z: f64, kind: RisConfigKind) -> Result<f64> {
    params.validate()?;
    let m = clt_moments(params.n_reflectors, kind);
    Ok((m.mu + z * (2.0 * m.sigma2).sqrt()) * params.statistic_scale(kind))
}

pub fn p_detection(
    params: &ChannelParams,
    y_th: f64,
    kind: RisConfigKind,
    mode: FormulaMode,
) -> Result<f64> {
    let z = detection_argument(params, y_th, kind)?;
    if params.n_reflectors < CLT_ADVISORY_MIN_REFLECTORS {
        log::warn!(
            "N = {} is below {}; the Gaussian approximation of the gain sum is coarse",
            params.n_reflectors,
            CLT_ADVISORY_MIN_REFLECTORS
        );
    }
    let value = match mode {
        FormulaMode::Physical => 0.5 * erfc(z),
        FormulaMode::PaperLiteral => 0.5 * (1.0 + erf(z)),
    };
    clamp_probability("p_d", value)
}

/// `alpha (1 - p_d) + (1 - alpha)(1 - p_f)`.
pub fn p_transmission(p_d: f64, p_f: f64, alpha: f64) -> Result<f64> {
    check_unit("p_d", p_d)?;
    check_unit("p_f", p_f)?;
    check_unit("alpha", alpha)?;
    clamp_probability("p_t", alpha * (1.0 - p_d) + (1.0 - alpha) * (1.0 - p_f))
}

/// `lambda R_s p_t`.
pub fn throughput(net: &SecondaryNetParams, p_t: f64) -> Result<f64> {
    net.validate()?;
    check_unit("p_t", p_t)?;
    Ok(net.rate_scale() * p_t)
}

/// Bracket of the literal-mode exact throughput,
/// `alpha erf(z) + (1 - alpha) erf(sqrt(y_th / (2 n0)))`.
pub fn transmission_paper_literal(
    params: &ChannelParams,
    sensing: &SensingParams,
    kind: RisConfigKind,
) -> Result<f64> {
    sensing.validate()?;
    let z = detection_argument(params, sensing.y_th, kind)?;
    let alpha = sensing.alpha;
    Ok(alpha * erf(z) + (1.0 - alpha) * p_no_false_alarm(sensing.y_th, params.n0))
}

/// Bracket of the literal-mode asymptotic throughput, `1 - alpha + alpha erf(z)`.
pub fn transmission_asymptotic(
    params: &ChannelParams,
    sensing: &SensingParams,
    kind: RisConfigKind,
) -> Result<f64> {
    sensing.validate()?;
    let z = detection_argument(params, sensing.y_th, kind)?;
    Ok(1.0 - sensing.alpha + sensing.alpha * erf(z))
}

/// Literal-mode exact throughput.
pub fn throughput_paper_literal(
    params: &ChannelParams,
    sensing: &SensingParams,
    net: &SecondaryNetParams,
    kind: RisConfigKind,
) -> Result<f64> {
    net.validate()?;
    Ok(net.rate_scale() * transmission_paper_literal(params, sensing, kind)?)
}

/// Literal-mode asymptotic throughput (second erf taken to its limit of 1).
pub fn throughput_asymptotic(
    params: &ChannelParams,
    sensing: &SensingParams,
    net: &SecondaryNetParams,
    kind: RisConfigKind,
) -> Result<f64> {
    net.validate()?;
    Ok(net.rate_scale() * transmission_asymptotic(params, sensing, kind)?)
}

/// Threshold giving false-alarm probability `p_f_target`: `2 n0 inv_erfc(p)^2`.
pub fn threshold_from_pf(p_f_target: f64, n0: f64) -> Result<f64> {
    if !(p_f_target > 0.0 && p_f_target < 1.0) {
        return Err(Error::domain(
            "p_f target",
            p_f_target,
            "must lie in (0, 1)",
        ));
    }
    check_noise(n0)?;
    let x = inv_erfc(p_f_target)?;
    Ok(2.0 * n0 * x * x)
}

/// Physical-mode metrics at one operating point.
pub fn metric_bundle(
    params: &ChannelParams,
    sensing: &SensingParams,
    net: &SecondaryNetParams,
    kind: RisConfigKind,
) -> Result<MetricBundle> {
    sensing.validate()?;
    let p_f = p_false_alarm(sensing.y_th, params.n0)?;
    let p_d = p_detection(params, sensing.y_th, kind, FormulaMode::Physical)?;
    compose_bundle(p_f, p_d, sensing.alpha, net)
}

/// Builds a bundle from the two sensing probabilities.
pub fn compose_bundle(
    p_f: f64,
    p_d: f64,
    alpha: f64,
    net: &SecondaryNetParams,
) -> Result<MetricBundle> {
    let p_m = 1.0 - p_d;
    let p_t = p_transmission(p_d, p_f, alpha)?;
    let p_t_asym = clamp_probability("asymptotic p_t", 1.0 - alpha + alpha * p_m)?;
    Ok(MetricBundle {
        p_f,
        p_d,
        p_m,
        p_t,
        throughput: throughput(net, p_t)?,
        throughput_asym: throughput(net, p_t_asym)?,
    })
}
