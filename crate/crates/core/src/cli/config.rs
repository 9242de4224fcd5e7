//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytic::FormulaMode;
use crate::error::{Error, Result};
use crate::model::{ChannelParams, RisConfigKind, SecondaryNetParams, SensingParams};
use crate::montecarlo::DEFAULT_SAMPLES;

pub const DEFAULT_SEED: u64 = 2021;
/// Thresholds for the P_t-vs-alpha curves. All sit above the N = 16 CLT mean
/// of both configurations, where the literal-mode brackets stay within [0, 1].
pub const DEFAULT_PT_THRESHOLDS: [f64; 3] = [26.0, 30.0, 40.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

/// Flat TOML config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n_reflectors: Option<OneOrMany<u32>>,
    pub beta: Option<f64>,
    pub r_c: Option<f64>,
    pub r_r: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub gamma_bar_db: Option<f64>,
    pub n0: Option<f64>,
    pub y_th: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda_density: Option<f64>,
    pub r_s: Option<f64>,
    pub kinds: Option<OneOrMany<String>>,
    pub mode: Option<String>,
    pub mc_samples: Option<u64>,
    pub no_mc: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub pt_thresholds: Option<OneOrMany<f64>>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Values supplied on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub no_mc: bool,
    pub mode: Option<String>,
    pub kinds: Option<Vec<String>>,
    pub n: Option<Vec<u32>>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub pt_thresholds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `n_reflectors` holds the first entry of `n_list`.
    pub channel: ChannelParams,
    pub sensing: SensingParams,
    pub net: SecondaryNetParams,
    pub n_list: Vec<u32>,
    pub kinds: Vec<RisConfigKind>,
    pub modes: Vec<FormulaMode>,
    /// `None` disables the Monte Carlo columns.
    pub mc_samples: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub pt_thresholds: Vec<f64>,
}

impl RunConfig {
    /// Defaults for a subcommand whose figure uses `default_n` reflectors.
    pub fn defaults(default_n: &[u32]) -> Self {
        RunConfig {
            channel: ChannelParams::default().with_reflectors(default_n[0]),
            sensing: SensingParams::default(),
            net: SecondaryNetParams::default(),
            n_list: default_n.to_vec(),
            kinds: RisConfigKind::ALL.to_vec(),
            modes: FormulaMode::ALL.to_vec(),
            mc_samples: Some(DEFAULT_SAMPLES),
            seed: DEFAULT_SEED,
            out: None,
            format: OutputFormat::Csv,
            pt_thresholds: DEFAULT_PT_THRESHOLDS.to_vec(),
        }
    }

    pub fn resolve(
        default_n: &[u32],
        file: Option<&FileConfig>,
        flags: &FlagOverrides,
    ) -> Result<Self> {
        let mut cfg = RunConfig::defaults(default_n);
        if let Some(file) = file {
            cfg.apply_file(file)?;
        }
        cfg.apply_flags(flags)?;
        cfg.channel.n_reflectors = cfg.n_list[0];
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: &FileConfig) -> Result<()> {
        let ch = &mut self.channel;
        set(&mut ch.beta, f.beta);
        set(&mut ch.r_c, f.r_c);
        set(&mut ch.r_r, f.r_r);
        set(&mut ch.n0, f.n0);
        match (f.gamma_bar, f.gamma_bar_db) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "`gamma_bar` and `gamma_bar_db` are mutually exclusive".into(),
                ))
            }
            (Some(lin), None) => ch.gamma_bar = lin,
            (None, Some(db)) => ch.gamma_bar = 10f64.powf(db / 10.0),
            (None, None) => {}
        }
        set(&mut self.sensing.y_th, f.y_th);
        set(&mut self.sensing.alpha, f.alpha);
        set(&mut self.net.lambda_density, f.lambda_density);
        set(&mut self.net.r_s, f.r_s);
        if let Some(n) = &f.n_reflectors {
            self.n_list = n.to_vec();
        }
        if let Some(k) = &f.kinds {
            self.kinds = parse_kinds(&k.to_vec())?;
        }
        if let Some(m) = &f.mode {
            self.modes = parse_modes(m)?;
        }
        if let Some(s) = f.mc_samples {
            self.mc_samples = Some(s);
        }
        if f.no_mc == Some(true) {
            self.mc_samples = None;
        }
        set(&mut self.seed, f.seed);
        if let Some(out) = &f.out {
            self.out = Some(out.clone());
        }
        if let Some(fmt) = &f.format {
            self.format = fmt.parse()?;
        }
        if let Some(t) = &f.pt_thresholds {
            self.pt_thresholds = t.to_vec();
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &FlagOverrides) -> Result<()> {
        set(&mut self.seed, f.seed);
        if let Some(s) = f.samples {
            self.mc_samples = Some(s);
        }
        if f.no_mc {
            self.mc_samples = None;
        }
        if let Some(m) = &f.mode {
            self.modes = parse_modes(m)?;
        }
        if let Some(k) = &f.kinds {
            self.kinds = parse_kinds(k)?;
        }
        if let Some(n) = &f.n {
            self.n_list = n.clone();
        }
        if let Some(out) = &f.out {
            self.out = Some(out.clone());
        }
        if let Some(fmt) = &f.format {
            self.format = fmt.parse()?;
        }
        if let Some(t) = &f.pt_thresholds {
            self.pt_thresholds = t.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.channel.validate().map_err(cfg_err)?;
        self.sensing.validate().map_err(cfg_err)?;
        self.net.validate().map_err(cfg_err)?;
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::Config(
                "n must list positive reflector counts".into(),
            ));
        }
        if self.kinds.is_empty() {
            return Err(Error::Config(
                "at least one RIS configuration is required".into(),
            ));
        }
        if self.mc_samples == Some(0) {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.pt_thresholds.is_empty()
            || self
                .pt_thresholds
                .iter()
                .any(|&t| !(t >= 0.0 && t.is_finite()))
        {
            return Err(Error::Config(
                "pt thresholds must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    /// `(kind, n)` pairs, kinds outermost.
    pub fn configs(&self) -> Vec<(RisConfigKind, u32)> {
        self.kinds
            .iter()
            .flat_map(|&k| self.n_list.iter().map(move |&n| (k, n)))
            .collect()
    }
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_kinds(items: &[String]) -> Result<Vec<RisConfigKind>> {
    let mut kinds = Vec::new();
    for item in items {
        let k: RisConfigKind = item.parse()?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    Ok(kinds)
}

pub fn parse_modes(s: &str) -> Result<Vec<FormulaMode>> {
    if s.trim().eq_ignore_ascii_case("both") {
        Ok(FormulaMode::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}
