//! Command-line front end: `run`, `compare` and `sweep`.
//!
//! Scenario flags may also come from a `key=value` file passed with
//! `--config`; keys are the long flag names (`p-opt` or `p_opt`). Precedence
//! is command line, then `ZSEP_SEED` for the seed, then the file, then the
//! built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::deployment::{read_nodes, write_nodes};
use crate::error::{Error, Result};
use crate::model::{Position, Protocol, RadioParams, ScenarioConfig};
use crate::report::{render_comparison, series_file_name, write_series_csv, write_summary_json};
use crate::simulator::{aggregate_runs, RunStatistics, RunSummary, Simulation};

#[derive(Debug, Parser)]
#[command(
    name = "zsep",
    version,
    about = "Round-based energy simulator for heterogeneous sensor networks (LEACH, SEP, Z-SEP)"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run one protocol over a batch of seeds
    Run {
        /// Protocol to simulate: leach, sep or zsep
        #[arg(long, default_value = "zsep", value_parser = parse_protocol)]
        protocol: Protocol,
        /// Write the first seed's deployment to this file
        #[arg(long, value_name = "FILE")]
        save_nodes: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run LEACH, SEP and Z-SEP on the same scenario and compare them
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare over the Cartesian product of comma-separated --n, --m, --alpha, --p-opt lists
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
struct ScenarioArgs {
    /// key=value scenario file; explicit flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Field width in meters
    #[arg(long, default_value_t = 100.0, value_parser = positive, allow_negative_numbers = true)]
    width: f64,
    /// Field height in meters
    #[arg(long, default_value_t = 100.0, value_parser = positive, allow_negative_numbers = true)]
    height: f64,
    /// Base station x coordinate
    #[arg(long, default_value_t = 50.0, value_parser = finite, allow_negative_numbers = true)]
    bs_x: f64,
    /// Base station y coordinate
    #[arg(long, default_value_t = 50.0, value_parser = finite, allow_negative_numbers = true)]
    bs_y: f64,
    /// Number of nodes
    #[arg(long, value_delimiter = ',', default_value = "100", value_parser = node_count)]
    n: Vec<usize>,
    /// Fraction of advance nodes, in [0, 1]
    #[arg(long, value_delimiter = ',', default_value = "0.2", value_parser = fraction, allow_negative_numbers = true)]
    m: Vec<f64>,
    /// Extra-energy multiplier of advance nodes, >= 0
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = non_negative, allow_negative_numbers = true)]
    alpha: Vec<f64>,
    /// Optimal cluster-head probability, in (0, 1]
    #[arg(long, value_delimiter = ',', default_value = "0.1", value_parser = probability, allow_negative_numbers = true)]
    p_opt: Vec<f64>,
    /// Initial energy of a normal node (J)
    #[arg(long, default_value_t = 0.5, value_parser = positive, allow_negative_numbers = true)]
    e0: f64,
    /// Electronics energy (J/bit)
    #[arg(long, default_value_t = 50e-9, value_parser = positive, allow_negative_numbers = true)]
    e_elec: f64,
    /// Free-space amplifier energy (J/bit/m^2)
    #[arg(long, default_value_t = 10e-12, value_parser = positive, allow_negative_numbers = true)]
    e_fs: f64,
    /// Multipath amplifier energy (J/bit/m^4)
    #[arg(long, default_value_t = 0.0013e-12, value_parser = positive, allow_negative_numbers = true)]
    e_amp: f64,
    /// Aggregation energy (J/bit/signal)
    #[arg(long, default_value_t = 5e-9, value_parser = positive, allow_negative_numbers = true)]
    e_da: f64,
    /// Data packet size in bits
    #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..))]
    packet_bits: u64,
    /// Round limit per run
    #[arg(long, default_value_t = 8000)]
    max_rounds: u64,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Seeds per protocol; seeds are seed, seed+1, ...
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// First seed
    #[arg(long, default_value_t = 1, env = "ZSEP_SEED")]
    seed: u64,
    /// Output directory; its parent must exist
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Which files to write
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,
    /// Run every seed on this fixed deployment (id,kind,x,y,energy lines)
    #[arg(long, value_name = "FILE")]
    nodes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

fn parse_protocol(s: &str) -> std::result::Result<Protocol, String> {
    s.parse()
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))
}

fn finite(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    v.is_finite()
        .then_some(v)
        .ok_or_else(|| format!("{v} is not finite"))
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v = finite(s)?;
    (v > 0.0)
        .then_some(v)
        .ok_or_else(|| format!("{v} must be > 0"))
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v = finite(s)?;
    (v >= 0.0)
        .then_some(v)
        .ok_or_else(|| format!("{v} must be >= 0"))
}

fn fraction(s: &str) -> std::result::Result<f64, String> {
    let v = finite(s)?;
    (0.0..=1.0)
        .contains(&v)
        .then_some(v)
        .ok_or_else(|| format!("{v} is outside [0, 1]"))
}

fn probability(s: &str) -> std::result::Result<f64, String> {
    let v = finite(s)?;
    (v > 0.0 && v <= 1.0)
        .then_some(v)
        .ok_or_else(|| format!("{v} is outside (0, 1]"))
}

fn node_count(s: &str) -> std::result::Result<usize, String> {
    let v = s
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("`{s}`: {e}"))?;
    (v >= 1)
        .then_some(v)
        .ok_or_else(|| "need at least one node".to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Run(Protocol),
    Compare,
    Sweep,
}

/// Sweep axes; run and compare carry exactly one value per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub n: Vec<usize>,
    pub m: Vec<f64>,
    pub alpha: Vec<f64>,
    pub p_opt: Vec<f64>,
}

impl SweepAxes {
    pub fn cell_count(&self) -> usize {
        self.n.len() * self.m.len() * self.alpha.len() * self.p_opt.len()
    }

    /// Every cell of the product applied to `base`, n slowest and p_opt fastest.
    pub fn cells(&self, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &n in &self.n {
            for &m in &self.m {
                for &alpha in &self.alpha {
                    for &p_opt in &self.p_opt {
                        out.push(ScenarioConfig {
                            n,
                            m,
                            alpha,
                            p_opt,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

/// A fully resolved command line.
#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub command: CommandKind,
    /// Scenario with the first value of every sweep axis.
    pub base: ScenarioConfig,
    pub sweep: SweepAxes,
    pub runs: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub nodes: Option<PathBuf>,
    pub save_nodes: Option<PathBuf>,
}

const SWEEP_FLAGS: [&str; 4] = ["n", "m", "alpha", "p_opt"];

/// Parses `argv` (program name first), merging a `--config` file if given.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliInvocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let mut cmd = Cli::command();
    let matches = cmd.try_get_matches_from_mut(argv.clone())?;
    let (sub_name, sub_matches) = matches
        .subcommand()
        .expect("subcommand is required by clap");

    let matches = match sub_matches.get_one::<PathBuf>("config") {
        Some(path) => {
            let extra = config_file_args(path, sub_matches, &mut cmd)?;
            let mut merged = argv[..1].to_vec();
            merged.push(sub_name.into());
            merged.extend(extra.into_iter().map(Into::into));
            // Everything after the subcommand name, unchanged.
            let sub_pos = argv
                .iter()
                .skip(1)
                .position(|a| a.to_str() == Some(sub_name))
                .map(|i| i + 1)
                .expect("subcommand present in argv");
            merged.extend(argv[sub_pos + 1..].iter().cloned());
            cmd.try_get_matches_from_mut(merged)?
        }
        None => matches,
    };
    let cli = Cli::from_arg_matches(&matches)?;
    resolve(cli, &mut cmd)
}

/// Flags from a key=value file for every key not already given explicitly.
fn config_file_args(
    path: &Path,
    matches: &ArgMatches,
    cmd: &mut clap::Command,
) -> std::result::Result<Vec<String>, clap::Error> {
    let text = fs::read_to_string(path).map_err(|e| {
        cmd.error(
            ErrorKind::Io,
            format!("cannot read config file {}: {e}", path.display()),
        )
    })?;
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(cmd.error(
                ErrorKind::InvalidValue,
                format!("{}:{}: expected key=value", path.display(), idx + 1),
            ));
        };
        entries.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    let mut args = Vec::new();
    for (id, value) in entries {
        if id == "config" {
            return Err(cmd.error(ErrorKind::InvalidValue, "config files cannot nest"));
        }
        let known = matches.ids().any(|a| a.as_str() == id);
        if !known {
            return Err(cmd.error(
                ErrorKind::UnknownArgument,
                format!("{}: unknown key `{id}`", path.display()),
            ));
        }
        match matches.value_source(&id) {
            Some(ValueSource::CommandLine) | Some(ValueSource::EnvVariable) => continue,
            _ => {}
        }
        args.push(format!("--{}={value}", id.replace('_', "-")));
    }
    Ok(args)
}

fn resolve(cli: Cli, cmd: &mut clap::Command) -> std::result::Result<CliInvocation, clap::Error> {
    let (command, scenario, output, save_nodes) = match cli.command {
        CliCommand::Run {
            protocol,
            save_nodes,
            scenario,
            output,
        } => (CommandKind::Run(protocol), scenario, output, save_nodes),
        CliCommand::Compare { scenario, output } => (CommandKind::Compare, scenario, output, None),
        CliCommand::Sweep { scenario, output } => (CommandKind::Sweep, scenario, output, None),
    };
    let sweep = SweepAxes {
        n: scenario.n.clone(),
        m: scenario.m.clone(),
        alpha: scenario.alpha.clone(),
        p_opt: scenario.p_opt.clone(),
    };
    let lens = [
        sweep.n.len(),
        sweep.m.len(),
        sweep.alpha.len(),
        sweep.p_opt.len(),
    ];
    if let Some(i) = lens.iter().position(|&l| l == 0) {
        return Err(cmd.error(
            ErrorKind::InvalidValue,
            format!(
                "--{} needs at least one value",
                SWEEP_FLAGS[i].replace('_', "-")
            ),
        ));
    }
    if command != CommandKind::Sweep {
        if let Some(i) = lens.iter().position(|&l| l > 1) {
            return Err(cmd.error(
                ErrorKind::InvalidValue,
                format!(
                    "--{} takes a single value here; use `sweep` for value lists",
                    SWEEP_FLAGS[i].replace('_', "-")
                ),
            ));
        }
    }
    let base = ScenarioConfig {
        field_width: scenario.width,
        field_height: scenario.height,
        bs_pos: Position::new(scenario.bs_x, scenario.bs_y),
        n: sweep.n[0],
        m: sweep.m[0],
        alpha: sweep.alpha[0],
        e0: scenario.e0,
        p_opt: sweep.p_opt[0],
        max_rounds: scenario.max_rounds,
        protocol: match command {
            CommandKind::Run(p) => p,
            _ => Protocol::Zsep,
        },
        radio: RadioParams {
            e_elec: scenario.e_elec,
            e_fs: scenario.e_fs,
            e_amp: scenario.e_amp,
            e_da: scenario.e_da,
            packet_bits: scenario.packet_bits,
        },
        seed: output.seed,
    };
    let protocols: Vec<Protocol> = match command {
        CommandKind::Run(p) => vec![p],
        _ => Protocol::ALL.to_vec(),
    };
    for cell in sweep.cells(&base) {
        for &protocol in &protocols {
            ScenarioConfig {
                protocol,
                ..cell.clone()
            }
            .validate()
            .map_err(|e| cmd.error(ErrorKind::ValueValidation, e.to_string()))?;
        }
    }
    Ok(CliInvocation {
        command,
        base,
        sweep,
        runs: output.runs,
        out_dir: output.out_dir,
        format: output.format,
        nodes: output.nodes,
        save_nodes,
    })
}

/// Creates `dir` if missing. Its parent must already exist.
fn ensure_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        return Ok(());
    }
    fs::create_dir(dir).map_err(|e| Error::io(dir, e))
}

/// Runs `runs` consecutive seeds of `cfg` in parallel, in seed order.
pub fn run_batch(
    cfg: &ScenarioConfig,
    runs: u64,
    nodes: Option<&[crate::model::Node]>,
) -> Result<Vec<RunSummary>> {
    (0..runs)
        .into_par_iter()
        .map(|k| {
            let c = cfg.with_seed(cfg.seed.wrapping_add(k));
            let sim = match nodes {
                Some(ns) => Simulation::replay(&c, ns.to_vec())?,
                None => Simulation::new(&c)?,
            };
            Ok(sim.finish())
        })
        .collect()
}

struct BatchOutput {
    stats: RunStatistics,
}

fn run_protocol(
    cfg: &ScenarioConfig,
    inv: &CliInvocation,
    nodes: Option<&[crate::model::Node]>,
    dir: &Path,
) -> Result<BatchOutput> {
    let summaries = run_batch(cfg, inv.runs, nodes)?;
    let stats = aggregate_runs(&summaries)?;
    if inv.format.csv() {
        for s in &summaries {
            write_series_csv(&s.rounds, &dir.join(series_file_name(&s.config)))?;
        }
    }
    if inv.format.json() {
        let name = format!("{}_{}_{}_summary.json", cfg.protocol.id(), cfg.m, cfg.alpha);
        write_summary_json(cfg, &summaries, &stats, &dir.join(name))?;
    }
    Ok(BatchOutput { stats })
}

fn load_nodes(inv: &CliInvocation) -> Result<Option<Vec<crate::model::Node>>> {
    inv.nodes.as_deref().map(read_nodes).transpose()
}

/// Compares all three protocols on `cell`, writing into `dir`. Returns the
/// rendered table.
fn compare_cell(
    cell: &ScenarioConfig,
    inv: &CliInvocation,
    nodes: Option<&[crate::model::Node]>,
    dir: &Path,
) -> Result<(String, Vec<RunStatistics>)> {
    let mut stats = Vec::new();
    for protocol in Protocol::ALL {
        let cfg = ScenarioConfig {
            protocol,
            ..cell.clone()
        };
        stats.push(run_protocol(&cfg, inv, nodes, dir)?.stats);
    }
    let table = render_comparison(&stats).to_string();
    fs::write(dir.join("comparison.txt"), &table)
        .map_err(|e| Error::io(dir.join("comparison.txt"), e))?;
    Ok((table, stats))
}

#[derive(Serialize)]
struct CellSummary<'a> {
    n: usize,
    m: f64,
    alpha: f64,
    p_opt: f64,
    protocols: Vec<CellProtocol<'a>>,
}

#[derive(Serialize)]
struct CellProtocol<'a> {
    protocol: Protocol,
    stability_period: &'a crate::simulator::MetricStats,
    instability_period: &'a crate::simulator::MetricStats,
    network_lifetime: &'a crate::simulator::MetricStats,
    throughput_bs: &'a crate::simulator::MetricStats,
    throughput_ch: &'a crate::simulator::MetricStats,
}

fn cell_dir_name(cell: &ScenarioConfig) -> String {
    format!(
        "n{}_m{}_alpha{}_p{}",
        cell.n, cell.m, cell.alpha, cell.p_opt
    )
}

pub fn cmd_run(inv: &CliInvocation, out: &mut dyn Write) -> Result<()> {
    ensure_dir(&inv.out_dir)?;
    let nodes = load_nodes(inv)?;
    if let Some(path) = &inv.save_nodes {
        let sim = Simulation::new(&inv.base)?;
        write_nodes(path, &sim.world().nodes)?;
    }
    let batch = run_protocol(&inv.base, inv, nodes.as_deref(), &inv.out_dir)?;
    let table = render_comparison(std::slice::from_ref(&batch.stats));
    write!(out, "{table}").map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_compare(inv: &CliInvocation, out: &mut dyn Write) -> Result<()> {
    ensure_dir(&inv.out_dir)?;
    let nodes = load_nodes(inv)?;
    let (table, _) = compare_cell(&inv.base, inv, nodes.as_deref(), &inv.out_dir)?;
    write!(out, "{table}").map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_sweep(inv: &CliInvocation, out: &mut dyn Write) -> Result<()> {
    ensure_dir(&inv.out_dir)?;
    let nodes = load_nodes(inv)?;
    for cell in inv.sweep.cells(&inv.base) {
        let dir = inv.out_dir.join(cell_dir_name(&cell));
        ensure_dir(&dir)?;
        let (table, stats) = compare_cell(&cell, inv, nodes.as_deref(), &dir)?;
        let summary = CellSummary {
            n: cell.n,
            m: cell.m,
            alpha: cell.alpha,
            p_opt: cell.p_opt,
            protocols: stats
                .iter()
                .map(|s| CellProtocol {
                    protocol: s.protocol,
                    stability_period: &s.stability_period,
                    instability_period: &s.instability_period,
                    network_lifetime: &s.network_lifetime,
                    throughput_bs: &s.throughput_bs,
                    throughput_ch: &s.throughput_ch,
                })
                .collect(),
        };
        let path = dir.join("cell_summary.json");
        fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")
            .map_err(|e| Error::io(&path, e))?;
        writeln!(
            out,
            "n={} m={} alpha={} p_opt={}",
            cell.n, cell.m, cell.alpha, cell.p_opt
        )
        .and_then(|_| writeln!(out, "{table}"))
        .map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn execute(inv: &CliInvocation, out: &mut dyn Write) -> Result<()> {
    match inv.command {
        CommandKind::Run(_) => cmd_run(inv, out),
        CommandKind::Compare => cmd_compare(inv, out),
        CommandKind::Sweep => cmd_sweep(inv, out),
    }
}
