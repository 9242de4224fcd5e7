//! The `riscr` command line.
//!
//! Exit codes: 0 success, 1 numeric or validation failure, 2 usage or
//! configuration error.

pub mod config;
pub mod output;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::sweep::{
    default_alpha_grid, default_pf_grid, default_threshold_grid, run_pt_sweep, run_roc,
    run_throughput_sweep, SweepRow, SweepSpec, SweepVariable, DEFAULT_THRESHOLD_POINTS,
};
use config::{FileConfig, FlagOverrides, OutputFormat, RunConfig};
use output::{Cell, Table};
use validate::{render_report, report_table, run_checks, ValidateOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const ROC_HEADER: [&str; 7] = ["pf", "config", "n", "mode", "pm", "pm_mc", "pm_mc_se"];
pub const THROUGHPUT_HEADER: [&str; 7] = [
    "yth",
    "config",
    "n",
    "mode",
    "throughput",
    "throughput_mc",
    "throughput_mc_se",
];
pub const PT_HEADER: [&str; 6] = ["alpha", "config", "yth", "mode", "pt_exact", "pt_asym"];

const ROC_DEFAULT_N: [u32; 2] = [16, 32];
const THROUGHPUT_DEFAULT_N: [u32; 2] = [16, 32];
const PT_DEFAULT_N: [u32; 1] = [16];
const VALIDATE_DEFAULT_N: [u32; 2] = [16, 32];

#[derive(Debug, Parser)]
#[command(
    name = "riscr",
    version,
    about = "RIS-assisted cognitive radio sensing: closed forms and Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complementary ROC: missed detection against false alarm.
    Roc(CommonArgs),
    /// Secondary throughput against detection threshold.
    Throughput(CommonArgs),
    /// SU transmission probability against PU activity.
    Pt(PtArgs),
    /// Run the oracle suite and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with parameter overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Analytic columns only.
    #[arg(long)]
    pub no_mc: bool,
    /// physical, paper-literal or both.
    #[arg(long)]
    pub mode: Option<String>,
    /// Comma-separated RIS configurations (ap, relay).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<String>>,
    /// Comma-separated reflector counts.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated detection thresholds, one curve each.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scale the reference CLT variances (negative control).
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub inject_variance_scale: f64,
}

fn resolve(
    common: &CommonArgs,
    default_n: &[u32],
    thresholds: Option<Vec<f64>>,
) -> Result<RunConfig> {
    let file = common.config.as_deref().map(FileConfig::load).transpose()?;
    let flags = FlagOverrides {
        seed: common.seed,
        samples: common.samples,
        no_mc: common.no_mc,
        mode: common.mode.clone(),
        kinds: common.kinds.clone(),
        n: common.n.clone(),
        out: common.out.clone(),
        format: common.format.clone(),
        pt_thresholds: thresholds,
    };
    RunConfig::resolve(default_n, file.as_ref(), &flags)
}

fn base_spec(cfg: &RunConfig, variable: SweepVariable, grid: Vec<f64>) -> SweepSpec {
    SweepSpec {
        variable,
        grid,
        configs: cfg.configs(),
        modes: cfg.modes.clone(),
        mc_samples: cfg.mc_samples,
        seed: cfg.seed,
        channel: cfg.channel,
    }
}

fn mc_cells(row: &SweepRow) -> [Cell; 2] {
    match row.mc {
        Some(mc) => [Cell::Num(mc.value), Cell::Num(mc.std_err)],
        None => [Cell::Empty, Cell::Empty],
    }
}

pub fn cmd_roc(cfg: &RunConfig) -> Result<Table> {
    let rows = run_roc(&base_spec(cfg, SweepVariable::PfGrid, default_pf_grid()))?;
    let mut t = Table::new(ROC_HEADER.to_vec());
    for r in &rows {
        let [mc, se] = mc_cells(r);
        t.push(vec![
            r.x.into(),
            r.kind.as_str().into(),
            r.n_reflectors.into(),
            r.mode.as_str().into(),
            r.value.into(),
            mc,
            se,
        ]);
    }
    Ok(t)
}

pub fn cmd_throughput(cfg: &RunConfig) -> Result<Table> {
    let grid = default_threshold_grid(&cfg.channel, &cfg.configs(), DEFAULT_THRESHOLD_POINTS)?;
    let spec = base_spec(cfg, SweepVariable::ThresholdGrid, grid);
    let rows = run_throughput_sweep(&spec, &cfg.sensing, &cfg.net)?;
    let mut t = Table::new(THROUGHPUT_HEADER.to_vec());
    for r in &rows {
        let [mc, se] = mc_cells(r);
        t.push(vec![
            r.x.into(),
            r.kind.as_str().into(),
            r.n_reflectors.into(),
            r.mode.as_str().into(),
            r.value.into(),
            mc,
            se,
        ]);
    }
    Ok(t)
}

pub fn cmd_pt(cfg: &RunConfig) -> Result<Table> {
    let spec = base_spec(cfg, SweepVariable::AlphaGrid, default_alpha_grid());
    let rows = run_pt_sweep(&spec, &cfg.pt_thresholds)?;
    let mut t = Table::new(PT_HEADER.to_vec());
    for r in &rows {
        t.push(vec![
            r.x.into(),
            r.kind.as_str().into(),
            r.y_th.into(),
            r.mode.as_str().into(),
            r.value.into(),
            r.value_asym.into(),
        ]);
    }
    Ok(t)
}

fn write_table(table: &Table, cfg: &RunConfig) -> Result<()> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match cfg.format {
        OutputFormat::Csv => table.write_csv(&mut w)?,
        OutputFormat::Json => table.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidSweep(_) | Error::Domain { .. } => EXIT_USAGE,
        Error::Numeric(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Roc(args) => {
            let cfg = resolve(&args, &ROC_DEFAULT_N, None)?;
            write_table(&cmd_roc(&cfg)?, &cfg)?;
        }
        Command::Throughput(args) => {
            let cfg = resolve(&args, &THROUGHPUT_DEFAULT_N, None)?;
            write_table(&cmd_throughput(&cfg)?, &cfg)?;
        }
        Command::Pt(args) => {
            let cfg = resolve(&args.common, &PT_DEFAULT_N, args.thresholds)?;
            write_table(&cmd_pt(&cfg)?, &cfg)?;
        }
        Command::Validate(args) => {
            let cfg = resolve(&args.common, &VALIDATE_DEFAULT_N, None)?;
            if !(args.inject_variance_scale > 0.0 && args.inject_variance_scale.is_finite()) {
                return Err(Error::Config(
                    "inject-variance-scale must be positive".into(),
                ));
            }
            let opts = ValidateOptions::from_config(&cfg, args.inject_variance_scale);
            let checks = run_checks(&opts)?;
            print!("{}", render_report(&checks));
            if cfg.out.is_some() {
                write_table(&report_table(&checks), &cfg)?;
            }
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
            for c in &failed {
                eprintln!(
                    "FAILED {}: observed {} vs reference {} (tolerance {})",
                    c.name,
                    output::format_sig(c.observed),
                    output::format_sig(c.reference),
                    output::format_sig(c.tolerance)
                );
            }
            if !failed.is_empty() {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the selected subcommand.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
