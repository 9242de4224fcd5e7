//! Parameter sweeps behind the ROC, throughput and transmission-probability
//! datasets.
//!
//! Every grid point gets its own random stream, `RngStream::new(seed, point)`,
//! where `point` is the row position of that (config, grid value) pair, so
//! the rows do not depend on evaluation order.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    self, clt_moments, p_detection, p_false_alarm, p_transmission, threshold_from_pf,
    transmission_asymptotic, transmission_paper_literal, FormulaMode,
};
use crate::error::{Error, Result};
use crate::model::{ChannelParams, RisConfigKind, RngStream, SecondaryNetParams, SensingParams};
use crate::montecarlo::{mc_metric_bundle, mc_p_detection};

pub const DEFAULT_PF_POINTS: usize = 40;
pub const DEFAULT_PF_RANGE: (f64, f64) = (1e-4, 0.99);
pub const DEFAULT_THRESHOLD_POINTS: usize = 60;
/// Standardized span `(Theta - mu) / sigma` the threshold grid must cover.
pub const DEFAULT_THRESHOLD_Z: f64 = 4.0;
pub const DEFAULT_ALPHA_POINTS: usize = 21;

/// MC values are only reported where the analytic probability is at least
/// this many expected hits out of the sample budget.
const MIN_EXPECTED_HITS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepVariable {
    PfGrid,
    ThresholdGrid,
    AlphaGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub configs: Vec<(RisConfigKind, u32)>,
    pub modes: Vec<FormulaMode>,
    /// `None` means analytic columns only.
    pub mc_samples: Option<u64>,
    pub seed: u64,
    /// Base channel; `n_reflectors` is replaced per config.
    pub channel: ChannelParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if let Some(w) = self
            .grid
            .windows(2)
            .find(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return bad(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            ));
        }
        let in_domain: fn(f64) -> bool = match self.variable {
            SweepVariable::PfGrid => |x| x > 0.0 && x < 1.0,
            SweepVariable::AlphaGrid => |x| (0.0..=1.0).contains(&x),
            SweepVariable::ThresholdGrid => |x| x >= 0.0 && x.is_finite(),
        };
        if let Some(x) = self.grid.iter().find(|&&x| !in_domain(x)) {
            return bad(format!(
                "grid value {x} outside the domain of {:?}",
                self.variable
            ));
        }
        if self.configs.is_empty() {
            return bad("no configurations".into());
        }
        if self.configs.iter().any(|&(_, n)| n == 0) {
            return bad("n_reflectors must be at least 1".into());
        }
        if self.modes.is_empty() {
            return bad("no formula modes".into());
        }
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].contains(m) {
                return bad(format!("mode {m} listed twice"));
            }
        }
        if self.mc_samples == Some(0) {
            return bad("mc_samples must be positive".into());
        }
        self.channel.validate()
    }

    fn expect(&self, variable: SweepVariable) -> Result<()> {
        if self.variable != variable {
            return Err(Error::InvalidSweep(format!(
                "expected a {variable:?} sweep, got {:?}",
                self.variable
            )));
        }
        self.validate()
    }

    fn channel_for(&self, n_reflectors: u32) -> ChannelParams {
        self.channel.with_reflectors(n_reflectors)
    }
}

/// Simulated counterpart of a row's value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowMc {
    pub value: f64,
    pub std_err: f64,
    pub n_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// The swept variable (p_f, y_th or alpha).
    pub x: f64,
    pub kind: RisConfigKind,
    pub n_reflectors: u32,
    pub mode: FormulaMode,
    /// Threshold in effect for this row.
    pub y_th: f64,
    /// P_m for ROC rows, throughput for threshold rows, exact P_t for alpha rows.
    pub value: f64,
    /// Asymptotic P_t (alpha rows only).
    pub value_asym: Option<f64>,
    pub mc: Option<RowMc>,
}

pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn logspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = linspace(start.log10(), end.log10(), points)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect();
    // Pin the endpoints exactly.
    if let Some(first) = grid.first_mut() {
        *first = start;
    }
    if points > 1 {
        grid[points - 1] = end;
    }
    grid
}

pub fn default_pf_grid() -> Vec<f64> {
    logspace(DEFAULT_PF_RANGE.0, DEFAULT_PF_RANGE.1, DEFAULT_PF_POINTS)
}

pub fn default_alpha_grid() -> Vec<f64> {
    linspace(0.0, 1.0, DEFAULT_ALPHA_POINTS)
}

/// Linear threshold grid spanning `mu +/- 4 sigma` of every configuration,
/// floored at zero.
pub fn default_threshold_grid(
    channel: &ChannelParams,
    configs: &[(RisConfigKind, u32)],
    points: usize,
) -> Result<Vec<f64>> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(kind, n) in configs {
        let p = channel.with_reflectors(n);
        p.validate()?;
        let m = clt_moments(n, kind);
        let scale = p.statistic_scale(kind);
        let spread = DEFAULT_THRESHOLD_Z * m.sigma2.sqrt();
        lo = lo.min((m.mu - spread) * scale);
        hi = hi.max((m.mu + spread) * scale);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidSweep("no configurations".into()));
    }
    Ok(linspace(lo.max(0.0), hi, points))
}

fn keep_mc(analytic_prob: f64, n_samples: u64, std_err: f64) -> bool {
    analytic_prob >= MIN_EXPECTED_HITS / n_samples as f64 && std_err > 0.0
}

/// Missed detection against false alarm. Rows are ordered by grid value,
/// then config, then mode. MC values appear on physical rows only.
pub fn run_roc(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.expect(SweepVariable::PfGrid)?;
    let n0 = spec.channel.n0;
    let points: Vec<(usize, f64, RisConfigKind, u32)> = spec
        .grid
        .iter()
        .enumerate()
        .flat_map(|(g, &pf)| spec.configs.iter().map(move |&(k, n)| (g, pf, k, n)))
        .collect();

    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .enumerate()
        .map(|(point, &(_, pf, kind, n))| {
            let params = spec.channel_for(n);
            let y_th = threshold_from_pf(pf, n0)?;
            let mc = match spec.mc_samples {
                Some(samples) if spec.modes.contains(&FormulaMode::Physical) => {
                    let p_m = 1.0 - p_detection(&params, y_th, kind, FormulaMode::Physical)?;
                    let rng = RngStream::new(spec.seed, point as u64);
                    let est = mc_p_detection(&params, y_th, kind, samples, &rng)?.complement();
                    keep_mc(p_m, samples, est.std_err).then_some(RowMc {
                        value: est.p_hat,
                        std_err: est.std_err,
                        n_samples: samples,
                    })
                }
                _ => None,
            };
            spec.modes
                .iter()
                .map(|&mode| {
                    Ok(SweepRow {
                        x: pf,
                        kind,
                        n_reflectors: n,
                        mode,
                        y_th,
                        value: 1.0 - p_detection(&params, y_th, kind, mode)?,
                        value_asym: None,
                        mc: if mode == FormulaMode::Physical {
                            mc
                        } else {
                            None
                        },
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Throughput against threshold. Rows are ordered by config, threshold, mode.
///
/// Physical rows compose `lambda R_s p_t` from the physical probabilities;
/// paper-literal rows use the literal-mode closed form.
pub fn run_throughput_sweep(
    spec: &SweepSpec,
    sensing: &SensingParams,
    net: &SecondaryNetParams,
) -> Result<Vec<SweepRow>> {
    spec.expect(SweepVariable::ThresholdGrid)?;
    sensing.validate()?;
    net.validate()?;
    let points: Vec<(RisConfigKind, u32, f64)> = spec
        .configs
        .iter()
        .flat_map(|&(k, n)| spec.grid.iter().map(move |&y| (k, n, y)))
        .collect();

    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .enumerate()
        .map(|(point, &(kind, n, y_th))| {
            let params = spec.channel_for(n);
            let s = SensingParams { y_th, ..*sensing };
            let physical = analytic::metric_bundle(&params, &s, net, kind)?;
            let mc = match spec.mc_samples {
                Some(samples) if spec.modes.contains(&FormulaMode::Physical) => {
                    let rng = RngStream::new(spec.seed, point as u64);
                    let sim = mc_metric_bundle(&params, &s, net, kind, samples, &rng)?;
                    keep_mc(physical.p_t, samples, sim.p_t_std_err).then_some(RowMc {
                        value: sim.bundle.throughput,
                        std_err: net.rate_scale() * sim.p_t_std_err,
                        n_samples: samples,
                    })
                }
                _ => None,
            };
            spec.modes
                .iter()
                .map(|&mode| {
                    let (value, mc) = match mode {
                        FormulaMode::Physical => (physical.throughput, mc),
                        FormulaMode::PaperLiteral => (
                            analytic::throughput_paper_literal(&params, &s, net, kind)?,
                            None,
                        ),
                    };
                    Ok(SweepRow {
                        x: y_th,
                        kind,
                        n_reflectors: n,
                        mode,
                        y_th,
                        value,
                        value_asym: None,
                        mc,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Transmission probability against PU activity, one curve per
/// (config, threshold). Rows are ordered by config, threshold, alpha, mode.
///
/// Values are probabilities (unit density and rate). Physical rows use
/// `alpha P_m + (1 - alpha)(1 - P_f)` with asymptote `1 - alpha + alpha P_m`;
/// paper-literal rows use the literal-mode exact and asymptotic brackets.
/// No MC columns are produced.
pub fn run_pt_sweep(spec: &SweepSpec, thresholds: &[f64]) -> Result<Vec<SweepRow>> {
    spec.expect(SweepVariable::AlphaGrid)?;
    if thresholds.is_empty() {
        return Err(Error::InvalidSweep("no thresholds".into()));
    }
    let mut rows = Vec::with_capacity(
        spec.configs.len() * thresholds.len() * spec.grid.len() * spec.modes.len(),
    );
    for &(kind, n) in &spec.configs {
        let params = spec.channel_for(n);
        for &y_th in thresholds {
            let p_f = p_false_alarm(y_th, params.n0)?;
            let p_d = p_detection(&params, y_th, kind, FormulaMode::Physical)?;
            for &alpha in &spec.grid {
                let s = SensingParams { y_th, alpha };
                for &mode in &spec.modes {
                    let (exact, asym) = match mode {
                        FormulaMode::Physical => (
                            p_transmission(p_d, p_f, alpha)?,
                            1.0 - alpha + alpha * (1.0 - p_d),
                        ),
                        FormulaMode::PaperLiteral => (
                            transmission_paper_literal(&params, &s, kind)?,
                            transmission_asymptotic(&params, &s, kind)?,
                        ),
                    };
                    rows.push(SweepRow {
                        x: alpha,
                        kind,
                        n_reflectors: n,
                        mode,
                        y_th,
                        value: exact,
                        value_asym: Some(asym),
                        mc: None,
                    });
                }
            }
        }
    }
    Ok(rows)
}
