//! Round loop, per-round records and run summaries.

use serde::Serialize;

use crate::deployment::{deploy_uniform, deploy_zonal};
use crate::error::ConfigError;
use crate::model::{NodeKind, Protocol, RandomSource, ScenarioConfig, UnitDraw};
use crate::protocols::{RoundEngine, RoundOutcome, World};

/// State of the network at the end of one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: u64,
    pub alive_normal: usize,
    pub alive_advance: usize,
    pub ch_count: u64,
    pub packets_to_bs_cum: u64,
    pub packets_to_ch_cum: u64,
    pub total_residual_energy: f64,
}

impl RoundRecord {
    pub fn alive_total(&self) -> usize {
        self.alive_normal + self.alive_advance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config: ScenarioConfig,
    pub stability_period: u64,
    pub instability_period: u64,
    pub network_lifetime: u64,
    pub throughput_bs: u64,
    pub throughput_ch: u64,
    #[serde(skip)]
    pub rounds: Vec<RoundRecord>,
}

/// A run in progress. Owns the world, election classes and random source.
#[derive(Debug, Clone)]
pub struct Simulation<R = RandomSource> {
    cfg: ScenarioConfig,
    world: World,
    engine: RoundEngine,
    rng: R,
    next_round: u64,
    packets_to_bs: u64,
    packets_to_ch: u64,
}

impl Simulation<RandomSource> {
    /// Validates `cfg` and deploys nodes for its protocol: zonal for Z-SEP,
    /// uniform otherwise.
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut rng = RandomSource::new(cfg.seed);
        let nodes = match cfg.protocol {
            Protocol::Zsep => deploy_zonal(cfg, &mut rng),
            Protocol::Leach | Protocol::Sep => deploy_uniform(cfg, &mut rng),
        };
        Self::assemble(cfg, nodes, RandomSource::elections(cfg.seed))
    }

    /// Runs `cfg` over a saved deployment with the elections `new` would draw.
    pub fn replay(
        cfg: &ScenarioConfig,
        nodes: Vec<crate::model::Node>,
    ) -> Result<Self, ConfigError> {
        Self::with_nodes(cfg, nodes, RandomSource::elections(cfg.seed))
    }
}

impl<R: UnitDraw> Simulation<R> {
    /// Runs `cfg` over a fixed node list instead of a fresh deployment.
    /// Node counts in `cfg` are not consulted.
    pub fn with_nodes(
        cfg: &ScenarioConfig,
        nodes: Vec<crate::model::Node>,
        rng: R,
    ) -> Result<Self, ConfigError> {
        if nodes.is_empty() {
            return Err(ConfigError::NoNodes);
        }
        cfg.radio.validate()?;
        Self::assemble(cfg, nodes, rng)
    }

    fn assemble(
        cfg: &ScenarioConfig,
        nodes: Vec<crate::model::Node>,
        rng: R,
    ) -> Result<Self, ConfigError> {
        Ok(Self {
            engine: RoundEngine::new(cfg)?,
            world: World::new(nodes, cfg.bs_pos, cfg.radio),
            cfg: cfg.clone(),
            rng,
            next_round: 0,
            packets_to_bs: 0,
            packets_to_ch: 0,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn engine(&self) -> &RoundEngine {
        &self.engine
    }

    pub fn node_count(&self) -> usize {
        self.world.nodes.len()
    }

    pub fn is_finished(&self) -> bool {
        self.next_round >= self.cfg.max_rounds || self.world.nodes.iter().all(|n| !n.alive)
    }

    /// Plays the next round. Returns `None` once `max_rounds` have been played
    /// or every node is dead.
    pub fn step(&mut self) -> Option<(RoundRecord, RoundOutcome)> {
        if self.is_finished() {
            return None;
        }
        let r = self.next_round;
        let outcome = self.engine.play(&mut self.world, r, &mut self.rng);
        self.next_round += 1;
        self.packets_to_bs += outcome.packets_to_bs;
        self.packets_to_ch += outcome.packets_to_ch;
        let record = RoundRecord {
            round: r + 1,
            alive_normal: self.world.alive_count(NodeKind::Normal),
            alive_advance: self.world.alive_count(NodeKind::Advance),
            ch_count: outcome.ch_count,
            packets_to_bs_cum: self.packets_to_bs,
            packets_to_ch_cum: self.packets_to_ch,
            total_residual_energy: self.world.residual_energy(),
        };
        Some((record, outcome))
    }

    /// Plays to completion and summarizes.
    pub fn finish(self) -> RunSummary {
        self.finish_observed(|_, _| {})
    }

    /// Like [`Simulation::finish`], handing every round to `observe` as it
    /// completes.
    pub fn finish_observed(
        mut self,
        mut observe: impl FnMut(&RoundRecord, &RoundOutcome),
    ) -> RunSummary {
        let mut rounds = Vec::new();
        while let Some((record, outcome)) = self.step() {
            observe(&record, &outcome);
            rounds.push(record);
        }
        summarize(self.cfg, self.world.nodes.len(), rounds)
    }
}

/// Runs one scenario end to end.
pub fn run(cfg: &ScenarioConfig) -> Result<RunSummary, ConfigError> {
    Ok(Simulation::new(cfg)?.finish())
}

fn summarize(config: ScenarioConfig, n: usize, rounds: Vec<RoundRecord>) -> RunSummary {
    let stability = stability_period(&rounds, n);
    let lifetime = network_lifetime(&rounds);
    let last = rounds.last();
    RunSummary {
        stability_period: stability,
        instability_period: lifetime - stability,
        network_lifetime: lifetime,
        throughput_bs: last.map_or(0, |r| r.packets_to_bs_cum),
        throughput_ch: last.map_or(0, |r| r.packets_to_ch_cum),
        config,
        rounds,
    }
}

/// 1-based round in which the alive count first fell below `n`; the series
/// length when nobody died.
pub fn stability_period(series: &[RoundRecord], n: usize) -> u64 {
    series
        .iter()
        .find(|r| r.alive_total() < n)
        .map_or(series.len() as u64, |r| r.round)
}

/// 1-based round in which the last node died; the series length when some
/// node survived.
pub fn network_lifetime(series: &[RoundRecord]) -> u64 {
    series
        .iter()
        .find(|r| r.alive_total() == 0)
        .map_or(series.len() as u64, |r| r.round)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricStats {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stddev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            mean,
            stddev,
            min,
            max,
        }
    }
}

/// Cross-seed statistics for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStatistics {
    pub protocol: Protocol,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub stability_period: MetricStats,
    pub instability_period: MetricStats,
    pub network_lifetime: MetricStats,
    pub throughput_bs: MetricStats,
    pub throughput_ch: MetricStats,
    /// Mean alive count after each round; finished runs count as 0 alive.
    pub mean_alive: Vec<f64>,
    /// Mean cumulative packets to the base station after each round.
    pub mean_packets_bs: Vec<f64>,
}

/// Aggregates runs that differ only in seed.
pub fn aggregate_runs(summaries: &[RunSummary]) -> Result<RunStatistics, ConfigError> {
    let first = summaries.first().ok_or(ConfigError::NoRuns)?;
    let reference = first.config.with_seed(0);
    if let Some(index) = summaries
        .iter()
        .position(|s| s.config.with_seed(0) != reference)
    {
        return Err(ConfigError::MixedConfigs { index });
    }
    let metric = |f: fn(&RunSummary) -> u64| {
        MetricStats::from_values(&summaries.iter().map(|s| f(s) as f64).collect::<Vec<_>>())
    };
    let len = summaries.iter().map(|s| s.rounds.len()).max().unwrap_or(0);
    let runs = summaries.len() as f64;
    let mut mean_alive = vec![0.0; len];
    let mut mean_packets_bs = vec![0.0; len];
    for s in summaries {
        let tail_packets = s.rounds.last().map_or(0, |r| r.packets_to_bs_cum) as f64;
        for i in 0..len {
            let (alive, packets) = s.rounds.get(i).map_or((0.0, tail_packets), |r| {
                (r.alive_total() as f64, r.packets_to_bs_cum as f64)
            });
            mean_alive[i] += alive / runs;
            mean_packets_bs[i] += packets / runs;
        }
    }
    Ok(RunStatistics {
        protocol: first.config.protocol,
        runs: summaries.len(),
        seeds: summaries.iter().map(|s| s.config.seed).collect(),
        stability_period: metric(|s| s.stability_period),
        instability_period: metric(|s| s.instability_period),
        network_lifetime: metric(|s| s.network_lifetime),
        throughput_bs: metric(|s| s.throughput_bs),
        throughput_ch: metric(|s| s.throughput_ch),
        mean_alive,
        mean_packets_bs,
    })
}
