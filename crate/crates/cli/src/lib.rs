//! Command-line front end for the MSDD simulator.
//!
//! Configuration precedence, lowest to highest: built-in defaults, the
//! `--config` TOML file, `--override key=value` entries in order, then the
//! dedicated flags (`--detector`, `--L`, ...).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use msdd_core::sim::{
    run_ber_sweep, run_overall_complexity, run_selftest, run_tradeoff, write_csv, ExperimentConfig,
    Manifest, OverallRow, ResultRow, TradeoffRow,
};
use serde::Serialize;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MSDD_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "msdd",
    version,
    about = "Soft-output MSDD for IR-UWB: coded BER and complexity experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER versus Eb/N0 for one detector at each block size.
    Ber(ExperimentArgs),
    /// Required Eb/N0 against search complexity over the clipping grid.
    Tradeoff(ExperimentArgs),
    /// Overall receiver complexity trajectories against a DD reference.
    Overall {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Code memory of the DD reference (default: overall.nu_ref).
        #[arg(long)]
        nu_ref: Option<u32>,
    },
    /// Detector consistency checks against exhaustive search.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random instances per block size.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Largest block size checked.
        #[arg(long = "max-L", default_value_t = 10)]
        max_block: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FrontEndArg {
    Waveform,
    Semi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DetectorArg {
    DdHard,
    DdSoft,
    Hosd,
    Sosd,
    MsddExhaustive,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if absent).
    #[arg(long, env = OUT_DIR_ENV, default_value = "msdd-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Config override `key=value`; dotted keys address sections. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum)]
    front_end: Option<FrontEndArg>,
    #[arg(long, value_enum)]
    detector: Option<DetectorArg>,
    /// Block size(s), comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    block_sizes: Vec<usize>,
    /// Clipping level (`inf` for unclipped max-log).
    #[arg(long)]
    llr_max: Option<f64>,
    #[arg(long, value_enum)]
    stopping: Option<Switch>,
    #[arg(long)]
    nu: Option<u32>,
}

impl ExperimentArgs {
    fn overrides(&self) -> Vec<String> {
        let mut ov = self.overrides.clone();
        if let Some(seed) = self.seed {
            ov.push(format!("seed={seed}"));
        }
        if let Some(fe) = self.front_end {
            let name = match fe {
                FrontEndArg::Waveform => "waveform",
                FrontEndArg::Semi => "semi_analytic",
            };
            ov.push(format!("front_end=\"{name}\""));
        }
        if let Some(d) = self.detector {
            let name = d.to_possible_value().expect("named variant");
            ov.push(format!(
                "detector=\"{}\"",
                name.get_name().replace('-', "_")
            ));
        }
        if !self.block_sizes.is_empty() {
            let list: Vec<String> = self.block_sizes.iter().map(|l| l.to_string()).collect();
            ov.push(format!("L=[{}]", list.join(",")));
        }
        if let Some(v) = self.llr_max {
            ov.push(format!("llr_max={}", toml_float(v)));
        }
        if let Some(s) = self.stopping {
            ov.push(format!("stopping={}", matches!(s, Switch::On)));
        }
        if let Some(nu) = self.nu {
            ov.push(format!("nu={nu}"));
        }
        ov
    }

    /// Effective configuration; `extra` overrides apply after the flags.
    fn load(&self, extra: &[String]) -> Result<ExperimentConfig, CliError> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!(
                    "config error at `--config`: {}: {e}",
                    path.display()
                ))
            })?,
            None => String::new(),
        };
        let mut overrides = self.overrides();
        overrides.extend_from_slice(extra);
        ExperimentConfig::from_toml_with_overrides(&text, &overrides).map_err(CliError::from)
    }
}

fn toml_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<msdd_core::Error> for CliError {
    fn from(e: msdd_core::Error) -> Self {
        match e {
            msdd_core::Error::Config { .. } => Self::Config(e.to_string()),
            other => Self::Runtime(other.to_string()),
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code: 0 on success, 2 for usage or config errors, 1 for
/// runtime failures.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Ber(args) => {
            let cfg = args.load(&[])?;
            prepare_out(&args.out)?;
            let rows = run_ber_sweep(&cfg)?;
            let mut outputs = vec![write_rows(&args.out, "ber.csv", &rows)?];
            outputs.push(emit_plot_data(PlotData::Ber(&rows), &args.out)?);
            finish(&args.out, "ber", &cfg, outputs)?;
            eprintln!("ber: {} rows written to {}", rows.len(), args.out.display());
        }
        Command::Tradeoff(args) => {
            let cfg = args.load(&[])?;
            prepare_out(&args.out)?;
            let report = run_tradeoff(&cfg)?;
            let outputs = vec![
                write_rows(&args.out, "tradeoff_sweeps.csv", &report.sweeps)?,
                write_rows(&args.out, "tradeoff.csv", &report.summary)?,
                emit_plot_data(PlotData::Tradeoff(&report.summary), &args.out)?,
            ];
            finish(&args.out, "tradeoff", &cfg, outputs)?;
            let missed = report.summary.iter().filter(|r| !r.reached).count();
            if missed > 0 {
                eprintln!(
                    "tradeoff: target BER {} not reached inside the grid for {missed} setting(s)",
                    cfg.target_ber
                );
            }
        }
        Command::Overall { exp, nu_ref } => {
            let extra: Vec<String> = nu_ref
                .map(|nu| format!("overall.nu_ref={nu}"))
                .into_iter()
                .collect();
            let cfg = exp.load(&extra)?;
            let args = exp;
            prepare_out(&args.out)?;
            let report = run_overall_complexity(&cfg, cfg.overall.nu_ref)?;
            let outputs = vec![
                write_rows(&args.out, "overall_sweeps.csv", &report.sweeps)?,
                write_rows(&args.out, "overall_candidates.csv", &report.candidates)?,
                write_rows(&args.out, "overall.csv", &report.selected)?,
                emit_plot_data(PlotData::Overall(&report.selected), &args.out)?,
            ];
            finish(&args.out, "overall", &cfg, outputs)?;
        }
        Command::Selftest {
            seed,
            instances,
            max_block,
        } => {
            if !(1..=16).contains(&max_block) {
                return Err(CliError::Usage("--max-L must lie in 1..=16".into()));
            }
            let results = run_selftest(seed, instances, max_block);
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                println!(
                    "{} {:<28} {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            println!(
                "selftest: {} passed, {failed} failed",
                results.len() - failed
            );
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn write_rows<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<String, CliError> {
    write_csv(dir.join(name), rows)?;
    Ok(name.to_string())
}

fn finish(
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    outputs: Vec<String>,
) -> Result<(), CliError> {
    Manifest::new(command, cfg, outputs).write(dir.join(format!("{command}_manifest.json")))?;
    Ok(())
}

/// Rows of one experiment, laid out as one figure-style view.
#[derive(Clone, Copy, Debug)]
pub enum PlotData<'a> {
    /// BER against Eb/N0 per detector and block size.
    Ber(&'a [ResultRow]),
    /// Required Eb/N0 against average search complexity per clipping level.
    Tradeoff(&'a [TradeoffRow]),
    /// Required Eb/N0 and overall complexity against block size.
    Overall(&'a [OverallRow]),
}

#[derive(Serialize)]
struct BerPoint {
    ebn0_db: f64,
    ber: f64,
    detector: String,
    #[serde(rename = "L")]
    block_size: usize,
}

#[derive(Serialize)]
struct TradeoffPoint {
    llr_max: f64,
    #[serde(rename = "L")]
    block_size: usize,
    required_ebn0_db: Option<f64>,
    avg_c_sd: Option<f64>,
}

#[derive(Serialize)]
struct TrajectoryPoint {
    #[serde(rename = "L")]
    block_size: usize,
    output: String,
    required_ebn0_db: Option<f64>,
    c_o_soft: Option<f64>,
    c_o_max: Option<f64>,
}

/// Writes the plot-ready file for one view into `dir`, returning its name.
pub fn emit_plot_data(data: PlotData<'_>, dir: &Path) -> Result<String, CliError> {
    let empty = match data {
        PlotData::Ber(r) => r.is_empty(),
        PlotData::Tradeoff(r) => r.is_empty(),
        PlotData::Overall(r) => r.is_empty(),
    };
    if empty {
        return Err(runtime("no rows to plot"));
    }
    match data {
        PlotData::Ber(rows) => {
            let pts: Vec<BerPoint> = rows
                .iter()
                .map(|r| BerPoint {
                    ebn0_db: r.ebn0_db,
                    ber: r.ber,
                    detector: r.detector.to_string(),
                    block_size: r.block_size,
                })
                .collect();
            write_rows(dir, "plot_ber_vs_ebn0.csv", &pts)
        }
        PlotData::Tradeoff(rows) => {
            let mut pts: Vec<TradeoffPoint> = rows
                .iter()
                .map(|r| TradeoffPoint {
                    llr_max: r.llr_max,
                    block_size: r.block_size,
                    required_ebn0_db: r.required_ebn0_db,
                    avg_c_sd: r.avg_c_sd,
                })
                .collect();
            // stable: block sizes keep their order within a clipping level
            pts.sort_by(|a, b| b.llr_max.total_cmp(&a.llr_max));
            write_rows(dir, "plot_tradeoff.csv", &pts)
        }
        PlotData::Overall(rows) => {
            let pts: Vec<TrajectoryPoint> = rows
                .iter()
                .map(|r| TrajectoryPoint {
                    block_size: r.block_size,
                    output: r.output.clone(),
                    required_ebn0_db: r.required_ebn0_db,
                    c_o_soft: r.c_o_soft,
                    c_o_max: r.c_o_max,
                })
                .collect();
            write_rows(dir, "plot_overall_trajectory.csv", &pts)
        }
    }
}
