//! CSV series, JSON summaries and the plain-text comparison table.
//!
//! # Series CSV
//!
//! ```text
//! round,alive_normal,alive_advance,alive_total,ch_count,packets_bs_cum,packets_ch_cum,residual_energy_j
//! 1,80,20,100,3,83,17,59.96...
//! ```
//!
//! One row per played round. Energies are printed with the shortest
//! representation that parses back to the same `f64`, so parsing and
//! re-serializing a file reproduces it byte for byte.
//!
//! # Summary JSON
//!
//! Top-level keys, all always present:
//!
//! * `config`: the scenario, seed set to the first seed of the batch
//! * `runs`: one object per seed with `seed`, `stability_period`,
//!   `instability_period`, `network_lifetime`, `throughput_bs`, `throughput_ch`
//! * `aggregate`: `protocol`, `runs`, `seeds`, `{mean, stddev, min, max}` for
//!   each of the five metrics above, and the `mean_alive` /
//!   `mean_packets_bs` per-round curves

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Protocol, ScenarioConfig};
use crate::simulator::{RoundRecord, RunStatistics, RunSummary};

pub const SERIES_HEADER: &str =
    "round,alive_normal,alive_advance,alive_total,ch_count,packets_bs_cum,packets_ch_cum,residual_energy_j";

/// `<protocol>_<m>_<alpha>_seed<k>.csv`
pub fn series_file_name(cfg: &ScenarioConfig) -> String {
    format!(
        "{}_{}_{}_seed{}.csv",
        cfg.protocol.id(),
        cfg.m,
        cfg.alpha,
        cfg.seed
    )
}

pub fn format_series_csv(series: &[RoundRecord]) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in series {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.round,
            r.alive_normal,
            r.alive_advance,
            r.alive_total(),
            r.ch_count,
            r.packets_to_bs_cum,
            r.packets_to_ch_cum,
            r.total_residual_energy
        );
    }
    out
}

pub fn parse_series_csv(text: &str) -> Result<Vec<RoundRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SERIES_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", f.len())));
        }
        let int = |i: usize| {
            f[i].parse::<u64>()
                .map_err(|e| err(format!("column {}: {e}", i + 1)))
        };
        let record = RoundRecord {
            round: int(0)?,
            alive_normal: int(1)? as usize,
            alive_advance: int(2)? as usize,
            ch_count: int(4)?,
            packets_to_bs_cum: int(5)?,
            packets_to_ch_cum: int(6)?,
            total_residual_energy: f[7].parse().map_err(|e| err(format!("column 8: {e}")))?,
        };
        if record.alive_total() as u64 != int(3)? {
            return Err(err(
                "alive_total does not match alive_normal + alive_advance".into(),
            ));
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_series_csv(series: &[RoundRecord], path: &Path) -> Result<()> {
    fs::write(path, format_series_csv(series)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Serialize)]
struct SeedSummary {
    seed: u64,
    stability_period: u64,
    instability_period: u64,
    network_lifetime: u64,
    throughput_bs: u64,
    throughput_ch: u64,
}

impl From<&RunSummary> for SeedSummary {
    fn from(s: &RunSummary) -> Self {
        Self {
            seed: s.config.seed,
            stability_period: s.stability_period,
            instability_period: s.instability_period,
            network_lifetime: s.network_lifetime,
            throughput_bs: s.throughput_bs,
            throughput_ch: s.throughput_ch,
        }
    }
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    config: &'a ScenarioConfig,
    runs: Vec<SeedSummary>,
    aggregate: &'a RunStatistics,
}

/// Renders the summary document for one protocol batch.
pub fn summary_json(
    config: &ScenarioConfig,
    summaries: &[RunSummary],
    stats: &RunStatistics,
) -> Result<String> {
    let doc = SummaryDocument {
        config,
        runs: summaries.iter().map(SeedSummary::from).collect(),
        aggregate: stats,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn write_summary_json(
    config: &ScenarioConfig,
    summaries: &[RunSummary],
    stats: &RunStatistics,
    path: &Path,
) -> Result<()> {
    let text = summary_json(config, summaries, stats)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub protocol: Protocol,
    pub stability_period: f64,
    pub network_lifetime: f64,
    pub throughput: f64,
}

/// Mean metrics per protocol. Throughput is packets delivered to the base
/// station.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub fn render_comparison(stats: &[RunStatistics]) -> ComparisonTable {
    ComparisonTable {
        rows: stats
            .iter()
            .map(|s| ComparisonRow {
                protocol: s.protocol,
                stability_period: s.stability_period.mean,
                network_lifetime: s.network_lifetime.mean,
                throughput: s.throughput_bs.mean,
            })
            .collect(),
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = [
            "Protocol",
            "Stability Period (Rounds)",
            "Network Lifetime (Rounds)",
            "Throughput (Packets)",
        ];
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.protocol.to_string(),
                    format!("{:.0}", r.stability_period),
                    format!("{:.0}", r.network_lifetime),
                    format!("{:.3e}", r.throughput),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        writeln!(
            f,
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            header[0],
            header[1],
            header[2],
            header[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        )?;
        for row in &cells {
            writeln!(
                f,
                "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                row[0],
                row[1],
                row[2],
                row[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            )?;
        }
        Ok(())
    }
}
