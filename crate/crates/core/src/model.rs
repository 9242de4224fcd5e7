//! Parameter types, the two RIS channel models and seeded sampling of the
//! sensed statistics under H0 (noise only) and H1 (primary user active).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the primary transmitter uses the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RisConfigKind {
    /// The surface is the transmitter's access point; one hop to the CR node.
    AccessPoint,
    /// The surface reflects the PU signal; two cascaded Rayleigh hops.
    Relay,
}

impl RisConfigKind {
    pub const ALL: [RisConfigKind; 2] = [RisConfigKind::AccessPoint, RisConfigKind::Relay];

    pub fn as_str(self) -> &'static str {
        match self {
            RisConfigKind::AccessPoint => "ap",
            RisConfigKind::Relay => "relay",
        }
    }
}

impl fmt::Display for RisConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RisConfigKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ap" | "access-point" | "accesspoint" => Ok(RisConfigKind::AccessPoint),
            "relay" | "rel" => Ok(RisConfigKind::Relay),
            other => Err(Error::Config(format!(
                "unknown RIS configuration `{other}` (expected `ap` or `relay`)"
            ))),
        }
    }
}

/// Channel and link-budget parameters shared by both configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Number of reflecting elements `N`.
    pub n_reflectors: u32,
    /// Path-loss exponent, common to both hops.
    pub beta: f64,
    /// PU (or RIS) to CR distance.
    pub r_c: f64,
    /// PU to RIS distance; only the relay configuration uses it.
    pub r_r: f64,
    /// Mean SNR `p_s / N0`, linear.
    pub gamma_bar: f64,
    /// Noise power under H0.
    pub n0: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            n_reflectors: 16,
            beta: 2.0,
            r_c: 1.0,
            r_r: 1.0,
            gamma_bar: 1.0,
            n0: 1.0,
        }
    }
}

fn positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, value, "must be positive and finite"))
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_reflectors == 0 {
            return Err(Error::domain("n_reflectors", 0.0, "must be at least 1"));
        }
        positive("beta", self.beta)?;
        positive("r_c", self.r_c)?;
        positive("r_r", self.r_r)?;
        positive("gamma_bar", self.gamma_bar)?;
        positive("n0", self.n0)
    }

    pub fn with_reflectors(self, n_reflectors: u32) -> Self {
        ChannelParams {
            n_reflectors,
            ..self
        }
    }

    /// Large-scale attenuation `r_c^-beta` or `(r_c r_r)^-beta`.
    pub fn path_gain(&self, kind: RisConfigKind) -> f64 {
        match kind {
            RisConfigKind::AccessPoint => self.r_c.powf(-self.beta),
            RisConfigKind::Relay => (self.r_c * self.r_r).powf(-self.beta),
        }
    }

    /// Factor mapping the summed fading gains onto the sensed SNR.
    pub fn statistic_scale(&self, kind: RisConfigKind) -> f64 {
        self.gamma_bar * self.path_gain(kind)
    }
}

/// Energy-detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    /// Detection threshold, in the units of the compared statistic.
    pub y_th: f64,
    /// Fraction of time the primary user is active.
    pub alpha: f64,
}

impl Default for SensingParams {
    fn default() -> Self {
        SensingParams {
            y_th: 5.0,
            alpha: 0.95,
        }
    }
}

impl SensingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_th >= 0.0 && self.y_th.is_finite()) {
            return Err(Error::domain("y_th", self.y_th, "must be finite and >= 0"));
        }
        check_unit("alpha", self.alpha)
    }
}

/// Secondary network density and per-link rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryNetParams {
    pub lambda_density: f64,
    /// Transmission rate in bits/s/Hz.
    pub r_s: f64,
}

impl Default for SecondaryNetParams {
    fn default() -> Self {
        SecondaryNetParams {
            lambda_density: 1.0,
            r_s: 10.0,
        }
    }
}

impl SecondaryNetParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_density >= 0.0 && self.lambda_density.is_finite()) {
            return Err(Error::domain(
                "lambda_density",
                self.lambda_density,
                "must be finite and >= 0",
            ));
        }
        if !(self.r_s >= 0.0 && self.r_s.is_finite()) {
            return Err(Error::domain("r_s", self.r_s, "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn rate_scale(&self) -> f64 {
        self.lambda_density * self.r_s
    }
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(what, value, "must lie in [0, 1]"))
    }
}

/// Word offset between consecutive sub-streams. A sub-stream must consume
/// fewer than 2^40 32-bit words before it runs into its neighbour.
const SUBSTREAM_WORDS_LOG2: u32 = 40;

/// A reproducible random stream identified by `(seed, stream_index)`.
///
/// Backed by ChaCha8: the seed selects the key, `stream_index` the ChaCha
/// stream (nonce), and [`RngStream::substream`] jumps the block counter, so
/// every `(seed, stream_index, block)` triple names a disjoint, platform
/// independent sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Fresh stream positioned at sub-stream `block` of this stream's identity.
    /// Independent of how much of `self` has already been consumed.
    pub fn substream(&self, block: u64) -> RngStream {
        let mut child = RngStream::new(self.seed, self.stream_index);
        child
            .rng
            .set_word_pos(u128::from(block) << SUBSTREAM_WORDS_LOG2);
        child
    }

    /// Independent stream for a named lane under the same seed, e.g. to keep
    /// the H0 and H1 samples of one operating point uncorrelated.
    pub fn fork(&self, lane: u64) -> RngStream {
        RngStream::new(self.seed, splitmix64(self.stream_index ^ splitmix64(lane)))
    }

    /// Uniform draw on `(0, 1]`.
    pub fn uniform_open_closed(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Inverse transform of the unit-scale Rayleigh law, `u` in `(0, 1]`.
#[inline]
pub fn rayleigh_from_uniform(u: f64) -> f64 {
    (-2.0 * u.ln()).sqrt()
}

/// One Rayleigh gain with density `x exp(-x^2/2)`.
#[inline]
pub fn sample_rayleigh(rng: &mut RngStream) -> f64 {
    rayleigh_from_uniform(rng.uniform_open_closed())
}

/// Sum of the per-element fading terms: `sum g_c` or `sum g_r g_c`.
///
/// Gains are drawn reflector by reflector; for the relay the RIS-side gain
/// comes first, then the CR-side gain.
pub fn sample_gain_sum(n_reflectors: u32, kind: RisConfigKind, rng: &mut RngStream) -> f64 {
    match kind {
        RisConfigKind::AccessPoint => (0..n_reflectors).map(|_| sample_rayleigh(rng)).sum(),
        RisConfigKind::Relay => (0..n_reflectors)
            .map(|_| {
                let g_r = sample_rayleigh(rng);
                let g_c = sample_rayleigh(rng);
                g_r * g_c
            })
            .sum(),
    }
}

/// Phase-aligned sensed SNR from explicit gains. `gains_r` is ignored for
/// the access-point configuration and must match `gains_c` in length for
/// the relay.
pub fn h1_statistic_from_gains(
    params: &ChannelParams,
    kind: RisConfigKind,
    gains_c: &[f64],
    gains_r: &[f64],
) -> f64 {
    let sum: f64 = match kind {
        RisConfigKind::AccessPoint => gains_c.iter().sum(),
        RisConfigKind::Relay => {
            assert_eq!(
                gains_c.len(),
                gains_r.len(),
                "one RIS-side gain per element"
            );
            gains_r.iter().zip(gains_c).map(|(r, c)| r * c).sum()
        }
    };
    params.statistic_scale(kind) * sum
}

/// One realization of the phase-matched sensed SNR under H1.
pub fn sample_h1_statistic(
    params: &ChannelParams,
    kind: RisConfigKind,
    rng: &mut RngStream,
) -> f64 {
    params.statistic_scale(kind) * sample_gain_sum(params.n_reflectors, kind, rng)
}

/// Sensed energy for a given noise amplitude.
#[inline]
pub fn h0_energy_from_noise(w: f64) -> f64 {
    w * w
}

/// One noise-only energy `w^2` with `w ~ N(0, n0)`, so that
/// `Pr(y0 > y) = erfc(sqrt(y / (2 n0)))`.
pub fn sample_h0_energy(n0: f64, rng: &mut RngStream) -> f64 {
    h0_energy_from_noise(n0.sqrt() * rng.standard_normal())
}
