//! Plain Monte Carlo estimators for the sensing probabilities.
//!
//! The sample index space is cut into fixed blocks of [`BLOCK_SIZE`]; block
//! `b` always draws from `rng.substream(b)`. Counts are integers, so the
//! result does not depend on how blocks are scheduled across threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, compose_bundle, MetricBundle};
use crate::error::{Error, Result};
use crate::model::{
    sample_h0_energy, sample_h1_statistic, ChannelParams, RisConfigKind, RngStream,
    SecondaryNetParams, SensingParams,
};

pub const BLOCK_SIZE: u64 = 4096;

/// Sample budget used when the caller does not pick one.
pub const DEFAULT_SAMPLES: u64 = 100_000;

const LANE_H0: u64 = 0;
const LANE_H1: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Binomial proportion estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub successes: u64,
    pub n_samples: u64,
    pub std_err: f64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, n_samples: u64) -> Self {
        assert!(n_samples > 0 && successes <= n_samples);
        let p_hat = successes as f64 / n_samples as f64;
        McEstimate {
            p_hat,
            successes,
            n_samples,
            std_err: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
        }
    }

    /// The estimate of `1 - p`; same standard error.
    pub fn complement(&self) -> Self {
        McEstimate::from_counts(self.n_samples - self.successes, self.n_samples)
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples == 0 {
        Err(Error::domain("n_samples", 0.0, "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Counts draws strictly above `threshold`.
pub fn estimate_exceedance<F>(
    draw: F,
    threshold: f64,
    n_samples: u64,
    rng: &RngStream,
    exec: Execution,
) -> McEstimate
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let count_block = |block: u64| -> u64 {
        let len = BLOCK_SIZE.min(n_samples - block * BLOCK_SIZE);
        let mut stream = rng.substream(block);
        (0..len).filter(|_| draw(&mut stream) > threshold).count() as u64
    };
    let successes = match exec {
        Execution::Serial => (0..n_blocks).map(count_block).sum(),
        Execution::Parallel => (0..n_blocks).into_par_iter().map(count_block).sum(),
    };
    McEstimate::from_counts(successes, n_samples)
}

/// Sample mean and unbiased variance of `n_samples` draws, accumulated per
/// block and merged in block order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMoments {
    pub n_samples: u64,
    pub mean: f64,
    pub variance: f64,
}

impl SampleMoments {
    pub fn mean_std_err(&self) -> f64 {
        (self.variance / self.n_samples as f64).sqrt()
    }
}

pub fn sample_moments<F>(draw: F, n_samples: u64, rng: &RngStream, exec: Execution) -> SampleMoments
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    assert!(n_samples >= 2, "variance needs at least two samples");
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    // (count, mean, sum of squared deviations) per block, Welford within.
    let block_stats = |block: u64| -> (f64, f64, f64) {
        let len = BLOCK_SIZE.min(n_samples - block * BLOCK_SIZE);
        let mut stream = rng.substream(block);
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for _ in 0..len {
            let x = draw(&mut stream);
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        (n, mean, m2)
    };
    let blocks: Vec<(f64, f64, f64)> = match exec {
        Execution::Serial => (0..n_blocks).map(block_stats).collect(),
        Execution::Parallel => (0..n_blocks).into_par_iter().map(block_stats).collect(),
    };
    let (n, mean, m2) = blocks
        .into_iter()
        .fold((0.0, 0.0, 0.0), |(na, ma, sa), (nb, mb, sb)| {
            let n = na + nb;
            let d = mb - ma;
            (n, ma + d * nb / n, sa + sb + d * d * na * nb / n)
        });
    SampleMoments {
        n_samples,
        mean,
        variance: m2 / (n - 1.0),
    }
}

pub fn mc_p_false_alarm(y_th: f64, n0: f64, n_samples: u64, rng: &RngStream) -> Result<McEstimate> {
    mc_p_false_alarm_with(y_th, n0, n_samples, rng, Execution::Parallel)
}

pub fn mc_p_false_alarm_with(
    y_th: f64,
    n0: f64,
    n_samples: u64,
    rng: &RngStream,
    exec: Execution,
) -> Result<McEstimate> {
    check_samples(n_samples)?;
    // Same domain as the closed form.
    analytic::p_false_alarm(y_th, n0)?;
    Ok(estimate_exceedance(
        |r| sample_h0_energy(n0, r),
        y_th,
        n_samples,
        rng,
        exec,
    ))
}

pub fn mc_p_detection(
    params: &ChannelParams,
    y_th: f64,
    kind: RisConfigKind,
    n_samples: u64,
    rng: &RngStream,
) -> Result<McEstimate> {
    mc_p_detection_with(params, y_th, kind, n_samples, rng, Execution::Parallel)
}

pub fn mc_p_detection_with(
    params: &ChannelParams,
    y_th: f64,
    kind: RisConfigKind,
    n_samples: u64,
    rng: &RngStream,
    exec: Execution,
) -> Result<McEstimate> {
    check_samples(n_samples)?;
    analytic::normalized_threshold(params, y_th, kind)?;
    Ok(estimate_exceedance(
        |r| sample_h1_statistic(params, kind, r),
        y_th,
        n_samples,
        rng,
        exec,
    ))
}

/// Simulated bundle together with the raw estimates behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMetricBundle {
    pub bundle: MetricBundle,
    pub p_f: McEstimate,
    pub p_d: McEstimate,
    /// Standard error of `p_t`, treating the H0 and H1 estimates as independent.
    pub p_t_std_err: f64,
}

/// H0 and H1 are sampled on separate forks of `rng`. `throughput_asym` is
/// taken from the closed form.
pub fn mc_metric_bundle(
    params: &ChannelParams,
    sensing: &SensingParams,
    net: &SecondaryNetParams,
    kind: RisConfigKind,
    n_samples: u64,
    rng: &RngStream,
) -> Result<McMetricBundle> {
    sensing.validate()?;
    net.validate()?;
    let p_f = mc_p_false_alarm(sensing.y_th, params.n0, n_samples, &rng.fork(LANE_H0))?;
    let p_d = mc_p_detection(params, sensing.y_th, kind, n_samples, &rng.fork(LANE_H1))?;
    let mut bundle = compose_bundle(p_f.p_hat, p_d.p_hat, sensing.alpha, net)?;
    bundle.throughput_asym = analytic::metric_bundle(params, sensing, net, kind)?.throughput_asym;
    let alpha = sensing.alpha;
    let p_t_std_err =
        (alpha * alpha * p_d.std_err.powi(2) + (1.0 - alpha).powi(2) * p_f.std_err.powi(2)).sqrt();
    Ok(McMetricBundle {
        bundle,
        p_f,
        p_d,
        p_t_std_err,
    })
}
