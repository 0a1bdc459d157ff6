//! Shared domain records: node state, radio constants, scenario
//! configuration and the seeded random source every run owns.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A point in the sensor field, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance between two positions.
pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Normal,
    Advance,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Normal => "normal",
            NodeKind::Advance => "advance",
        }
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normal" => Ok(NodeKind::Normal),
            "advance" => Ok(NodeKind::Advance),
            other => Err(format!("unknown node kind `{other}`")),
        }
    }
}

/// Initial battery of a node: `e0` for normal nodes, `e0 * (1 + alpha)` for
/// advance nodes.
pub fn initial_energy(kind: NodeKind, e0: f64, alpha: f64) -> f64 {
    match kind {
        NodeKind::Normal => e0,
        NodeKind::Advance => e0 * (1.0 + alpha),
    }
}

/// One sensor node and its per-run mutable state.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    pub pos: Position,
    /// Residual energy in joules, clamped at zero.
    pub energy: f64,
    pub alive: bool,
    /// Times this node served as cluster head in the current epoch (0 or 1).
    pub ch_count_this_epoch: u32,
    pub rounds_since_epoch_start: u64,
}

impl Node {
    pub fn new(id: usize, kind: NodeKind, pos: Position, energy: f64) -> Self {
        Self {
            id,
            kind,
            pos,
            energy,
            alive: energy > 0.0,
            ch_count_this_epoch: 0,
            rounds_since_epoch_start: 0,
        }
    }

    /// Deducts up to `joules` from the battery and returns what was actually
    /// taken. A node drained to zero is marked dead.
    pub fn drain(&mut self, joules: f64) -> f64 {
        if joules <= 0.0 || self.energy <= 0.0 {
            return 0.0;
        }
        if joules >= self.energy {
            let taken = self.energy;
            self.energy = 0.0;
            self.alive = false;
            taken
        } else {
            self.energy -= joules;
            joules
        }
    }
}

/// First-order radio model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Electronics energy per bit, transmit and receive (J/bit).
    pub e_elec: f64,
    /// Free-space amplifier energy (J/bit/m^2).
    pub e_fs: f64,
    /// Multipath amplifier energy (J/bit/m^4).
    pub e_amp: f64,
    /// Aggregation energy (J/bit/signal).
    pub e_da: f64,
    pub packet_bits: u64,
}

/// Defaults are the constants of the reference SEP simulations:
/// 50 nJ/bit electronics, 10 pJ/bit/m^2 free space, 0.0013 pJ/bit/m^4
/// multipath, 5 nJ/bit/signal aggregation and 4000-bit packets.
impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            e_fs: 10e-12,
            e_amp: 0.0013e-12,
            e_da: 5e-9,
            packet_bits: 4000,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("e_elec", self.e_elec),
            ("e_fs", self.e_fs),
            ("e_amp", self.e_amp),
            ("e_da", self.e_da),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NonPositive { field: name, value });
            }
        }
        if self.packet_bits == 0 {
            return Err(ConfigError::NonPositive {
                field: "packet_bits",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Routing protocol driven by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Leach,
    Sep,
    Zsep,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Leach, Protocol::Sep, Protocol::Zsep];

    /// Lower-case identifier used in file names and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            Protocol::Leach => "leach",
            Protocol::Sep => "sep",
            Protocol::Zsep => "zsep",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Leach => "LEACH",
            Protocol::Sep => "SEP",
            Protocol::Zsep => "Z-SEP",
        })
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "leach" => Ok(Protocol::Leach),
            "sep" => Ok(Protocol::Sep),
            "zsep" | "z-sep" => Ok(Protocol::Zsep),
            other => Err(format!(
                "unknown protocol `{other}` (expected leach, sep or zsep)"
            )),
        }
    }
}

/// Everything that determines a run, seed included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub field_width: f64,
    pub field_height: f64,
    pub bs_pos: Position,
    pub n: usize,
    /// Fraction of advance nodes.
    pub m: f64,
    /// Extra-energy multiplier of advance nodes.
    pub alpha: f64,
    /// Initial energy of a normal node (J).
    pub e0: f64,
    pub p_opt: f64,
    pub max_rounds: u64,
    pub protocol: Protocol,
    pub radio: RadioParams,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            field_width: 100.0,
            field_height: 100.0,
            bs_pos: Position::new(50.0, 50.0),
            n: 100,
            m: 0.2,
            alpha: 1.0,
            e0: 0.5,
            p_opt: 0.1,
            max_rounds: 8000,
            protocol: Protocol::Zsep,
            radio: RadioParams::default(),
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Number of advance nodes: `m * n` rounded to the nearest integer, ties up.
    pub fn advance_count(&self) -> usize {
        advance_count(self.n, self.m)
    }

    pub fn normal_count(&self) -> usize {
        self.n - self.advance_count()
    }

    /// Sum of all initial batteries.
    pub fn total_initial_energy(&self) -> f64 {
        let a = self.advance_count() as f64;
        let normals = self.normal_count() as f64;
        normals * self.e0 + a * initial_energy(NodeKind::Advance, self.e0, self.alpha)
    }

    /// Same scenario with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (field, value) in [
            ("field_width", self.field_width),
            ("field_height", self.field_height),
            ("e0", self.e0),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NonPositive { field, value });
            }
        }
        if self.n == 0 {
            return Err(ConfigError::NoNodes);
        }
        if !(0.0..=1.0).contains(&self.m) {
            return Err(ConfigError::OutOfRange {
                field: "m",
                value: self.m,
                expected: "[0, 1]",
            });
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(ConfigError::OutOfRange {
                field: "alpha",
                value: self.alpha,
                expected: ">= 0",
            });
        }
        if !(self.p_opt > 0.0 && self.p_opt <= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "p_opt",
                value: self.p_opt,
                expected: "(0, 1]",
            });
        }
        let b = self.bs_pos;
        if !(b.x.is_finite() && b.y.is_finite()) {
            return Err(ConfigError::OutOfRange {
                field: "bs_pos",
                value: if b.x.is_finite() { b.y } else { b.x },
                expected: "finite coordinates",
            });
        }
        self.radio.validate()?;
        // Clustering needs at least one expected head per round.
        let clustered = match self.protocol {
            Protocol::Leach | Protocol::Sep => self.n,
            Protocol::Zsep => self.advance_count(),
        };
        if clustered > 0 && self.p_opt * clustered as f64 + 1e-9 < 1.0 {
            return Err(ConfigError::TooFewHeads {
                p_opt: self.p_opt,
                n: clustered,
            });
        }
        crate::election::p_advance(self.p_opt, self.m, self.alpha)?;
        Ok(())
    }
}

pub(crate) fn advance_count(n: usize, m: f64) -> usize {
    // Nudge absorbs representation error in products such as 0.1 * 100.
    let exact = m * n as f64;
    ((exact + 0.5 + 1e-9).floor() as usize).min(n)
}

/// Source of uniform draws in `[0, 1)`.
///
/// Election and deployment only ever consume draws through this trait, so a
/// recorded trace can stand in for the generator.
pub trait UnitDraw {
    fn next_unit(&mut self) -> f64;
}

/// Explicitly seeded generator owned by a single run.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream of the same seed, used for head elections so a
    /// saved deployment replays identically.
    pub fn elections(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        Self { rng }
    }
}

impl UnitDraw for RandomSource {
    fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Replays a fixed list of draws, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedDraws {
    draws: Vec<f64>,
    cursor: usize,
}

impl ScriptedDraws {
    pub fn new(draws: Vec<f64>) -> Self {
        assert!(!draws.is_empty(), "scripted trace needs at least one draw");
        Self { draws, cursor: 0 }
    }

    /// Number of draws consumed so far.
    pub fn consumed(&self) -> usize {
        self.cursor
    }
}

impl UnitDraw for ScriptedDraws {
    fn next_unit(&mut self) -> f64 {
        let v = self.draws[self.cursor % self.draws.len()];
        self.cursor += 1;
        v
    }
}
