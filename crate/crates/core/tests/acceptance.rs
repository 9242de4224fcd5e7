//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{erf_series, erfc_oracle};
use riscr::analytic::{
    p_detection, p_false_alarm, p_transmission, threshold_for_argument, throughput,
    transmission_asymptotic, transmission_paper_literal, FormulaMode,
};
use riscr::cli::cmd_roc;
use riscr::cli::config::{RunConfig, DEFAULT_SEED};
use riscr::cli::validate::{z_grid, PF_CHECK_THRESHOLDS};
use riscr::model::{
    sample_gain_sum, ChannelParams, RisConfigKind, RngStream, SecondaryNetParams, SensingParams,
};
use riscr::montecarlo::{
    mc_p_detection, mc_p_detection_with, mc_p_false_alarm, mc_p_false_alarm_with, sample_moments,
    Execution,
};
use riscr::specfun::{erf, erfc, inv_erfc};
use riscr::sweep::{
    default_pf_grid, default_threshold_grid, linspace, logspace, run_roc, run_throughput_sweep,
    SweepRow, SweepSpec, SweepVariable, DEFAULT_THRESHOLD_POINTS,
};

use RisConfigKind::{AccessPoint, Relay};

const CONFIGS: [(RisConfigKind, u32); 4] = [
    (AccessPoint, 16),
    (AccessPoint, 32),
    (Relay, 16),
    (Relay, 32),
];
const MC_SAMPLES: u64 = 100_000;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn within_budget(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

// 1. erf/erfc within 1e-12 of the oracle on 1000 points in [-6, 6];
//    inv_erfc round trip within 1e-10 on (1e-10, 2 - 1e-10); under 1 s.
fn special_functions() -> Verdict {
    let start = Instant::now();
    let mut worst_erf: f64 = 0.0;
    let mut worst_erfc: f64 = 0.0;
    for x in linspace(-6.0, 6.0, 1000) {
        worst_erf = worst_erf.max((erf(x) - erf_series(x)).abs());
        worst_erfc = worst_erfc.max((erfc(x) - erfc_oracle(x)).abs());
    }
    let mut worst_trip: f64 = 0.0;
    let lower = logspace(1e-10, 1.0, 500);
    let ps = lower.iter().copied().chain(lower.iter().map(|p| 2.0 - p));
    let mut trip_ok = true;
    for p in ps {
        match inv_erfc(p) {
            Ok(x) => worst_trip = worst_trip.max((erfc(x) - p).abs()),
            Err(_) => trip_ok = false,
        }
    }
    let elapsed = start.elapsed();
    let passed = worst_erf <= 1e-12
        && worst_erfc <= 1e-12
        && trip_ok
        && worst_trip <= 1e-10
        && within_budget(elapsed, 1.0);
    verdict(
        passed,
        format!(
            "max |erf err| {worst_erf:.2e}, max |erfc err| {worst_erfc:.2e} (tol 1e-12); \
             max round-trip err {worst_trip:.2e} (tol 1e-10); {:.3} s (budget 1 s)",
            elapsed.as_secs_f64()
        ),
    )
}

// 2. Gain-sum mean and variance within 1% at 1e6 draws, N in {1, 16, 32};
//    under 10 s.
fn moments() -> Verdict {
    let start = Instant::now();
    let mut worst_rel: f64 = 0.0;
    let mut where_worst = String::new();
    for (i, kind) in [AccessPoint, Relay].into_iter().enumerate() {
        for (j, n) in [1u32, 16, 32].into_iter().enumerate() {
            let rng = RngStream::new(DEFAULT_SEED, 200 + (i * 3 + j) as u64);
            let m = sample_moments(
                |r| sample_gain_sum(n, kind, r),
                1_000_000,
                &rng,
                Execution::Parallel,
            );
            let (mu, var) = match kind {
                AccessPoint => (n as f64 * (PI / 2.0).sqrt(), n as f64 * (2.0 - PI / 2.0)),
                Relay => (n as f64 * PI / 2.0, n as f64 * (4.0 - PI * PI / 4.0)),
            };
            for (what, got, want) in [("mean", m.mean, mu), ("variance", m.variance, var)] {
                let rel = ((got - want) / want).abs();
                if rel > worst_rel {
                    worst_rel = rel;
                    where_worst = format!("{kind} N={n} {what}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst_rel <= 0.01 && within_budget(elapsed, 10.0),
        format!(
            "worst relative error {:.3}% at {where_worst} (tol 1%); {:.2} s (budget 10 s)",
            100.0 * worst_rel,
            elapsed.as_secs_f64()
        ),
    )
}

fn grid_threshold(params: &ChannelParams, kind: RisConfigKind, z_std: f64) -> f64 {
    threshold_for_argument(params, z_std / SQRT_2, kind).expect("valid threshold")
}

// 3. |Physical p_d - MC p_d| <= max(3 SE, 0.02) on the z grid, 1e5 samples;
//    under 60 s.
fn clt_agreement() -> Verdict {
    let start = Instant::now();
    let channel = ChannelParams::default();
    let mut failures = Vec::new();
    let mut worst = (0.0f64, String::new());
    for (c, &(kind, n)) in CONFIGS.iter().enumerate() {
        let params = channel.with_reflectors(n);
        for (i, z) in z_grid().into_iter().enumerate() {
            let y = grid_threshold(&params, kind, z);
            let rng = RngStream::new(DEFAULT_SEED, 300 + (c * 64 + i) as u64);
            let est = mc_p_detection(&params, y, kind, MC_SAMPLES, &rng).expect("mc");
            let want = p_detection(&params, y, kind, FormulaMode::Physical).expect("closed form");
            let diff = (est.p_hat - want).abs();
            let tol = (3.0 * est.std_err).max(0.02);
            if diff > worst.0 {
                worst = (diff, format!("{kind} N={n} z={z:+.1}"));
            }
            if diff > tol {
                failures.push(format!(
                    "{kind} N={n} z={z:+.1}: |{:.4} - {want:.4}| = {diff:.4} > {tol:.4}",
                    est.p_hat
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let mut detail = format!(
        "worst |diff| {:.4} at {} (tol max(3 SE, 0.02)); {} of {} points out; {:.2} s (budget 60 s)",
        worst.0,
        worst.1,
        failures.len(),
        CONFIGS.len() * z_grid().len(),
        elapsed.as_secs_f64()
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join("; ")));
    }
    verdict(failures.is_empty() && within_budget(elapsed, 60.0), detail)
}

// 4. |p_f - MC p_f| <= 3 SE at 10 thresholds, 1e5 samples; under 5 s.
fn false_alarm() -> Verdict {
    let start = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    let mut bad = 0;
    for (i, &y) in PF_CHECK_THRESHOLDS.iter().enumerate() {
        let rng = RngStream::new(DEFAULT_SEED, 400 + i as u64);
        let est = mc_p_false_alarm(y, 1.0, MC_SAMPLES, &rng).expect("mc");
        let want = p_false_alarm(y, 1.0).expect("closed form");
        let ratio = (est.p_hat - want).abs() / est.std_err;
        worst_ratio = worst_ratio.max(ratio);
        if ratio > 3.0 {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad == 0 && within_budget(elapsed, 5.0),
        format!(
            "worst |diff|/SE {worst_ratio:.2} over {} thresholds (tol 3); {:.2} s (budget 5 s)",
            PF_CHECK_THRESHOLDS.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// 5. MC p_d strictly decreasing in y_th over the z grid (1e5 samples per
//    point) like the physical form; literal = 1 - physical within 1e-12.
fn orientation() -> Verdict {
    let channel = ChannelParams::default();
    let mut mc_violations = 0;
    let mut physical_violations = 0;
    let mut complement: f64 = 0.0;
    for (c, &(kind, n)) in CONFIGS.iter().enumerate() {
        let params = channel.with_reflectors(n);
        let mut prev: Option<(f64, f64)> = None;
        for (i, z) in z_grid().into_iter().enumerate() {
            let y = grid_threshold(&params, kind, z);
            let rng = RngStream::new(DEFAULT_SEED, 500 + (c * 64 + i) as u64);
            let mc = mc_p_detection(&params, y, kind, MC_SAMPLES, &rng)
                .expect("mc")
                .p_hat;
            let phys = p_detection(&params, y, kind, FormulaMode::Physical).expect("closed form");
            let lit =
                p_detection(&params, y, kind, FormulaMode::PaperLiteral).expect("closed form");
            complement = complement.max((lit - (1.0 - phys)).abs());
            if let Some((pm, pp)) = prev {
                mc_violations += usize::from(mc >= pm);
                physical_violations += usize::from(phys >= pp);
            }
            prev = Some((mc, phys));
        }
    }
    verdict(
        mc_violations == 0 && physical_violations == 0 && complement <= 1e-12,
        format!(
            "MC increases {mc_violations}, physical increases {physical_violations} (want 0); \
             max |literal - (1 - physical)| {complement:.1e} (tol 1e-12)"
        ),
    )
}

fn analytic_spec(variable: SweepVariable, grid: Vec<f64>, mode: FormulaMode) -> SweepSpec {
    SweepSpec {
        variable,
        grid,
        configs: CONFIGS.to_vec(),
        modes: vec![mode],
        mc_samples: None,
        seed: DEFAULT_SEED,
        channel: ChannelParams::default(),
    }
}

fn value_at(rows: &[SweepRow], kind: RisConfigKind, n: u32, x: f64) -> f64 {
    rows.iter()
        .find(|r| r.kind == kind && r.n_reflectors == n && r.x == x)
        .expect("row present")
        .value
}

// 6. Physical P_m(32) <= P_m(16) wherever values are >= 1e-8, both kinds;
//    somewhere P_m(16)/P_m(32) >= 1e3 with both values >= 1e-8.
fn roc_trend() -> Verdict {
    const FLOOR: f64 = 1e-8;
    let grid = default_pf_grid();
    let rows = run_roc(&analytic_spec(
        SweepVariable::PfGrid,
        grid.clone(),
        FormulaMode::Physical,
    ))
    .expect("roc");
    let mut violations = 0;
    let mut best_ratio: f64 = 0.0;
    let mut best_at = String::new();
    for kind in [AccessPoint, Relay] {
        for &pf in &grid {
            let p16 = value_at(&rows, kind, 16, pf);
            let p32 = value_at(&rows, kind, 32, pf);
            if p16.max(p32) >= FLOOR && p32 > p16 {
                violations += 1;
            }
            if p16 >= FLOOR && p32 >= FLOOR && p16 / p32 > best_ratio {
                best_ratio = p16 / p32;
                best_at = format!("{kind} p_f={pf:.3e}");
            }
        }
    }
    verdict(
        violations == 0 && best_ratio >= 1e3,
        format!("P_m(32) > P_m(16) at {violations} points (want 0); best ratio {best_ratio:.3e} at {best_at} (want >= 1e3)"),
    )
}

// 7. Paper-literal throughput: nondecreasing in y_th, increasing in N,
//    relay >= access point, on the default threshold grid.
fn throughput_trends() -> Verdict {
    let grid = default_threshold_grid(
        &ChannelParams::default(),
        &CONFIGS,
        DEFAULT_THRESHOLD_POINTS,
    )
    .expect("grid");
    let spec = analytic_spec(
        SweepVariable::ThresholdGrid,
        grid.clone(),
        FormulaMode::PaperLiteral,
    );
    let rows = run_throughput_sweep(
        &spec,
        &SensingParams::default(),
        &SecondaryNetParams::default(),
    )
    .expect("sweep");
    let mut not_monotone = 0;
    for &(kind, n) in &CONFIGS {
        let t: Vec<f64> = grid.iter().map(|&y| value_at(&rows, kind, n, y)).collect();
        not_monotone += t.windows(2).filter(|w| w[1] < w[0]).count();
    }
    let mut not_increasing_in_n = 0;
    let mut relay_below = 0;
    for &y in &grid {
        for kind in [AccessPoint, Relay] {
            not_increasing_in_n +=
                usize::from(value_at(&rows, kind, 32, y) <= value_at(&rows, kind, 16, y));
        }
        for n in [16, 32] {
            relay_below +=
                usize::from(value_at(&rows, Relay, n, y) < value_at(&rows, AccessPoint, n, y));
        }
    }
    let total = grid.len() * 2;
    verdict(
        not_monotone == 0 && not_increasing_in_n == 0 && relay_below == 0,
        format!(
            "decreases in y_th: {not_monotone}; T(32) <= T(16): {not_increasing_in_n}/{total}; \
             T_relay < T_ap: {relay_below}/{total} (all want 0)"
        ),
    )
}

// 8. y_th = 5, N0 = 1, N = 16: max over alpha of |literal - asymptotic|
//    <= 1e-3, and the gap at alpha = 0 equals P_f.
fn asymptote() -> Verdict {
    let params = ChannelParams::default().with_reflectors(16);
    let y_th = 5.0;
    let p_f = p_false_alarm(y_th, params.n0).expect("p_f");
    let mut max_gap: f64 = 0.0;
    let mut gap_at_zero = f64::NAN;
    for kind in [AccessPoint, Relay] {
        for alpha in linspace(0.0, 1.0, 101) {
            let s = SensingParams { y_th, alpha };
            let gap = (transmission_paper_literal(&params, &s, kind).expect("exact")
                - transmission_asymptotic(&params, &s, kind).expect("asymptotic"))
            .abs();
            max_gap = max_gap.max(gap);
            if alpha == 0.0 && kind == AccessPoint {
                gap_at_zero = gap;
            }
        }
    }
    let zero_err = (gap_at_zero - p_f).abs();
    verdict(
        max_gap <= 1e-3 && zero_err <= 1e-15,
        format!(
            "max gap {max_gap:.6} (tol 1e-3); gap at alpha=0 {gap_at_zero:.6} vs P_f {p_f:.6}, \
             |diff| {zero_err:.1e} (tol 1e-15)"
        ),
    )
}

// 9. Endpoint identities, exact.
fn endpoints() -> Verdict {
    let mut bad = Vec::new();
    for n0 in [0.01, 1.0, 3.5, 1e3] {
        if p_false_alarm(0.0, n0).expect("p_f") != 1.0 {
            bad.push(format!("p_f(0, {n0}) != 1"));
        }
    }
    let channel = ChannelParams::default();
    for &(kind, n) in &CONFIGS {
        let params = channel.with_reflectors(n);
        for y in [0.5, 5.0, 20.0, 40.0] {
            let p_f = p_false_alarm(y, params.n0).expect("p_f");
            let p_d = p_detection(&params, y, kind, FormulaMode::Physical).expect("p_d");
            if p_transmission(p_d, p_f, 0.0).expect("p_t") != 1.0 - p_f {
                bad.push(format!("{kind} N={n} y={y}: P_t(0) != 1 - P_f"));
            }
            if p_transmission(p_d, p_f, 1.0).expect("p_t") != 1.0 - p_d {
                bad.push(format!("{kind} N={n} y={y}: P_t(1) != P_m"));
            }
            let p_t = p_transmission(p_d, p_f, 0.5).expect("p_t");
            let net = SecondaryNetParams {
                lambda_density: 0.0,
                r_s: 10.0,
            };
            if throughput(&net, p_t).expect("throughput") != 0.0 {
                bad.push(format!("{kind} N={n} y={y}: T(lambda=0) != 0"));
            }
        }
    }
    let detail = if bad.is_empty() {
        "all identities hold exactly".to_string()
    } else {
        bad.join("; ")
    };
    verdict(bad.is_empty(), detail)
}

fn run_binary_roc(out: &std::path::Path) -> Option<Vec<u8>> {
    let status = Command::new(env!("CARGO_BIN_EXE_riscr"))
        .args(["roc", "--seed", "2021", "--out"])
        .arg(out)
        .status()
        .ok()?;
    if !status.success() {
        return None;
    }
    std::fs::read(out).ok()
}

// 10. Repeated roc runs write identical bytes; serial and parallel MC give
//     identical estimates.
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = run_binary_roc(&dir.path().join("a.csv"));
    let b = run_binary_roc(&dir.path().join("b.csv"));
    let files_equal = matches!((&a, &b), (Some(x), Some(y)) if x == y && !x.is_empty());

    let cfg = RunConfig::defaults(&[16, 32]);
    let render = || {
        let mut buf = Vec::new();
        cmd_roc(&cfg)
            .expect("roc")
            .write_csv(&mut buf)
            .expect("csv");
        buf
    };
    let lib_equal = render() == render();

    let mut exec_mismatch = 0;
    let channel = ChannelParams::default();
    for (c, &(kind, n)) in CONFIGS.iter().enumerate() {
        let params = channel.with_reflectors(n);
        let rng = RngStream::new(DEFAULT_SEED, 900 + c as u64);
        let y = grid_threshold(&params, kind, 0.5);
        let s =
            mc_p_detection_with(&params, y, kind, MC_SAMPLES, &rng, Execution::Serial).expect("mc");
        let p = mc_p_detection_with(&params, y, kind, MC_SAMPLES, &rng, Execution::Parallel)
            .expect("mc");
        exec_mismatch += usize::from(s != p);
    }
    let rng = RngStream::new(DEFAULT_SEED, 950);
    let s = mc_p_false_alarm_with(2.0, 1.0, MC_SAMPLES, &rng, Execution::Serial).expect("mc");
    let p = mc_p_false_alarm_with(2.0, 1.0, MC_SAMPLES, &rng, Execution::Parallel).expect("mc");
    exec_mismatch += usize::from(s != p);

    verdict(
        files_equal && lib_equal && exec_mismatch == 0,
        format!(
            "binary roc files identical: {files_equal}; cmd_roc output identical: {lib_equal}; \
             serial/parallel mismatches: {exec_mismatch} (want 0)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("special-function accuracy", special_functions),
        ("moment reproduction", moments),
        ("analytic vs Monte Carlo detection", clt_agreement),
        ("false-alarm exactness", false_alarm),
        ("orientation", orientation),
        ("ROC trend in N", roc_trend),
        ("throughput trends (literal)", throughput_trends),
        ("asymptotic transmission", asymptote),
        ("endpoint identities", endpoints),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.passed);
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
