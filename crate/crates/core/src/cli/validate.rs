//! The `validate` oracle suite: sampler moments, closed form against Monte
//! Carlo, detection orientation and the asymptotic-throughput gap.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use crate::analytic::{
    clt_moments, p_detection, p_false_alarm, threshold_for_argument, transmission_asymptotic,
    transmission_paper_literal, FormulaMode,
};
use crate::cli::config::RunConfig;
use crate::cli::output::{format_sig, Cell, Table};
use crate::error::Result;
use crate::model::{
    sample_gain_sum, sample_rayleigh, ChannelParams, RisConfigKind, RngStream, SensingParams,
};
use crate::montecarlo::{
    mc_p_detection, mc_p_false_alarm, sample_moments, Execution, McEstimate, DEFAULT_SAMPLES,
};
use crate::specfun::erfc;
use crate::sweep::linspace;

pub const MOMENT_SAMPLES: u64 = 1_000_000;
pub const MOMENT_REL_TOL: f64 = 0.01;
/// Allowance for the Gaussian approximation on top of 3 standard errors.
pub const CLT_ALLOWANCE: f64 = 0.02;
pub const ASYMPTOTE_TOL: f64 = 1e-3;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const Z_GRID_POINTS: usize = 13;
pub const Z_GRID_SPAN: f64 = 3.0;
pub const PF_CHECK_THRESHOLDS: [f64; 10] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0];

// Stream-index bases, kept apart so checks never share draws.
const STREAM_RAYLEIGH: u64 = 1 << 20;
const STREAM_SUMS: u64 = 2 << 20;
const STREAM_PF: u64 = 3 << 20;
const STREAM_PD: u64 = 4 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub n_samples: Option<u64>,
    pub std_err: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub channel: ChannelParams,
    pub sensing: SensingParams,
    pub configs: Vec<(RisConfigKind, u32)>,
    pub samples: u64,
    pub seed: u64,
    /// Multiplies every CLT variance used as a reference. 1.0 in normal use;
    /// anything else is a negative control that must make checks fail.
    pub variance_scale: f64,
}

impl ValidateOptions {
    pub fn from_config(cfg: &RunConfig, variance_scale: f64) -> Self {
        ValidateOptions {
            channel: cfg.channel,
            sensing: cfg.sensing,
            configs: cfg.configs(),
            samples: cfg.mc_samples.unwrap_or(DEFAULT_SAMPLES),
            seed: cfg.seed,
            variance_scale,
        }
    }
}

/// Standardized thresholds `(Theta - mu) / sigma` at which detection is checked.
pub fn z_grid() -> Vec<f64> {
    linspace(-Z_GRID_SPAN, Z_GRID_SPAN, Z_GRID_POINTS)
}

/// Physical detection probability, optionally with a distorted variance.
fn reference_pd(
    params: &ChannelParams,
    y_th: f64,
    kind: RisConfigKind,
    variance_scale: f64,
) -> Result<f64> {
    if variance_scale == 1.0 {
        return p_detection(params, y_th, kind, FormulaMode::Physical);
    }
    let m = clt_moments(params.n_reflectors, kind);
    let theta = y_th / params.statistic_scale(kind);
    Ok(0.5 * erfc((theta - m.mu) / (2.0 * m.sigma2 * variance_scale).sqrt()))
}

fn relative_check(name: String, observed: f64, reference: f64, n: u64, se: f64) -> Check {
    let tolerance = MOMENT_REL_TOL * reference.abs();
    Check {
        name,
        observed,
        reference,
        tolerance,
        n_samples: Some(n),
        std_err: Some(se),
        passed: (observed - reference).abs() <= tolerance,
    }
}

fn moment_checks(opts: &ValidateOptions, out: &mut Vec<Check>) {
    let rng = RngStream::new(opts.seed, STREAM_RAYLEIGH);
    let m = sample_moments(sample_rayleigh, MOMENT_SAMPLES, &rng, Execution::Parallel);
    out.push(relative_check(
        "rayleigh mean".into(),
        m.mean,
        (PI / 2.0).sqrt(),
        m.n_samples,
        m.mean_std_err(),
    ));
    out.push(relative_check(
        "rayleigh variance".into(),
        m.variance,
        2.0 - PI / 2.0,
        m.n_samples,
        f64::NAN,
    ));

    for (i, &(kind, n)) in opts.configs.iter().enumerate() {
        let rng = RngStream::new(opts.seed, STREAM_SUMS + i as u64);
        let m = sample_moments(
            |r| sample_gain_sum(n, kind, r),
            MOMENT_SAMPLES,
            &rng,
            Execution::Parallel,
        );
        let clt = clt_moments(n, kind);
        out.push(relative_check(
            format!("{kind} N={n} gain-sum mean"),
            m.mean,
            clt.mu,
            m.n_samples,
            m.mean_std_err(),
        ));
        out.push(relative_check(
            format!("{kind} N={n} gain-sum variance"),
            m.variance,
            clt.sigma2 * opts.variance_scale,
            m.n_samples,
            f64::NAN,
        ));
    }
}

fn false_alarm_checks(opts: &ValidateOptions, out: &mut Vec<Check>) -> Result<()> {
    let n0 = opts.channel.n0;
    for (i, &y) in PF_CHECK_THRESHOLDS.iter().enumerate() {
        let rng = RngStream::new(opts.seed, STREAM_PF + i as u64);
        let est = mc_p_false_alarm(y * n0, n0, opts.samples, &rng)?;
        let want = p_false_alarm(y * n0, n0)?;
        let tol = 3.0 * est.std_err;
        out.push(Check {
            name: format!("p_f at y_th={}", format_sig(y * n0)),
            observed: est.p_hat,
            reference: want,
            tolerance: tol,
            n_samples: Some(est.n_samples),
            std_err: Some(est.std_err),
            passed: (est.p_hat - want).abs() <= tol,
        });
    }
    Ok(())
}

/// Agreement and orientation checks over the z grid for one configuration.
fn detection_checks(opts: &ValidateOptions, cfg_index: usize, out: &mut Vec<Check>) -> Result<()> {
    let (kind, n) = opts.configs[cfg_index];
    let params = opts.channel.with_reflectors(n);
    let mut worst: Option<(f64, f64, f64, McEstimate)> = None; // (excess, analytic, tol, est)
    let mut all_pass = true;
    let mut estimates = Vec::new();
    let mut physical = Vec::new();
    let mut literal = Vec::new();
    let mut complement_err: f64 = 0.0;

    for (i, &z) in z_grid().iter().enumerate() {
        let y = threshold_for_argument(&params, z / SQRT_2, kind)?;
        let rng = RngStream::new(opts.seed, STREAM_PD + (cfg_index * 64 + i) as u64);
        let est = mc_p_detection(&params, y, kind, opts.samples, &rng)?;
        let want = reference_pd(&params, y, kind, opts.variance_scale)?;
        let tol = (3.0 * est.std_err).max(CLT_ALLOWANCE);
        let excess = (est.p_hat - want).abs() - tol;
        all_pass &= excess <= 0.0;
        if worst.is_none_or(|w| excess > w.0) {
            worst = Some((excess, want, tol, est));
        }
        let phys = p_detection(&params, y, kind, FormulaMode::Physical)?;
        let lit = p_detection(&params, y, kind, FormulaMode::PaperLiteral)?;
        complement_err = complement_err.max((phys + lit - 1.0).abs());
        estimates.push(est.p_hat);
        physical.push(phys);
        literal.push(lit);
    }

    let (_, want, tol, est) = worst.expect("non-empty z grid");
    out.push(Check {
        name: format!("{kind} N={n} p_d closed form vs MC (worst z)"),
        observed: est.p_hat,
        reference: want,
        tolerance: tol,
        n_samples: Some(est.n_samples),
        std_err: Some(est.std_err),
        passed: all_pass,
    });

    let violations = |xs: &[f64], ok: fn(f64, f64) -> bool| {
        xs.windows(2).filter(|w| !ok(w[0], w[1])).count() as f64
    };
    let mc_bad = violations(&estimates, |a, b| b < a);
    out.push(Check {
        name: format!("{kind} N={n} MC p_d decreasing in y_th"),
        observed: mc_bad,
        reference: 0.0,
        tolerance: 0.0,
        n_samples: Some(opts.samples),
        std_err: None,
        passed: mc_bad == 0.0,
    });
    let orient_bad = violations(&physical, |a, b| b <= a) + violations(&literal, |a, b| b >= a);
    out.push(Check {
        name: format!("{kind} N={n} closed-form orientation"),
        observed: orient_bad,
        reference: 0.0,
        tolerance: 0.0,
        n_samples: None,
        std_err: None,
        passed: orient_bad == 0.0,
    });
    out.push(Check {
        name: format!("{kind} N={n} literal + physical = 1"),
        observed: complement_err,
        reference: 0.0,
        tolerance: IDENTITY_TOL,
        n_samples: None,
        std_err: None,
        passed: complement_err <= IDENTITY_TOL,
    });
    Ok(())
}

fn asymptote_checks(opts: &ValidateOptions, cfg_index: usize, out: &mut Vec<Check>) -> Result<()> {
    let (kind, n) = opts.configs[cfg_index];
    let params = opts.channel.with_reflectors(n);
    let y_th = opts.sensing.y_th;
    let p_f = p_false_alarm(y_th, params.n0)?;
    let mut max_gap: f64 = 0.0;
    let mut identity_err: f64 = 0.0;
    for alpha in linspace(0.0, 1.0, 101) {
        let s = SensingParams { y_th, alpha };
        let gap = (transmission_paper_literal(&params, &s, kind)?
            - transmission_asymptotic(&params, &s, kind)?)
        .abs();
        max_gap = max_gap.max(gap);
        identity_err = identity_err.max((gap - (1.0 - alpha) * p_f).abs());
    }
    out.push(Check {
        name: format!("{kind} N={n} asymptote gap = (1-alpha) p_f"),
        observed: identity_err,
        reference: 0.0,
        tolerance: IDENTITY_TOL,
        n_samples: None,
        std_err: None,
        passed: identity_err <= IDENTITY_TOL,
    });
    out.push(Check {
        name: format!("{kind} N={n} asymptote gap at y_th={}", format_sig(y_th)),
        observed: max_gap,
        reference: 0.0,
        tolerance: ASYMPTOTE_TOL,
        n_samples: None,
        std_err: None,
        passed: max_gap <= ASYMPTOTE_TOL,
    });
    Ok(())
}

pub fn run_checks(opts: &ValidateOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    moment_checks(opts, &mut checks);
    false_alarm_checks(opts, &mut checks)?;
    for i in 0..opts.configs.len() {
        detection_checks(opts, i, &mut checks)?;
    }
    for i in 0..opts.configs.len() {
        asymptote_checks(opts, i, &mut checks)?;
    }
    Ok(checks)
}

fn opt_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format_sig(v),
        _ => "-".into(),
    }
}

pub fn render_report(checks: &[Check]) -> String {
    let width = checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<width$}  {:>16}  {:>16}  {:>12}  {:>9}  {:>12}  status",
        "check", "observed", "reference", "tolerance", "n_samples", "std_err"
    );
    for c in checks {
        let _ = writeln!(
            s,
            "{:<width$}  {:>16}  {:>16}  {:>12}  {:>9}  {:>12}  {}",
            c.name,
            format_sig(c.observed),
            format_sig(c.reference),
            format_sig(c.tolerance),
            c.n_samples.map_or("-".into(), |n| n.to_string()),
            opt_num(c.std_err),
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
    s
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec![
        "check",
        "observed",
        "reference",
        "tolerance",
        "n_samples",
        "std_err",
        "status",
    ]);
    for c in checks {
        t.push(vec![
            Cell::Text(c.name.clone()),
            c.observed.into(),
            c.reference.into(),
            c.tolerance.into(),
            c.n_samples.map_or(Cell::Empty, Cell::Int),
            c.std_err.filter(|v| v.is_finite()).into(),
            Cell::Text(if c.passed { "pass" } else { "fail" }.into()),
        ]);
    }
    t
}
