//! One round of LEACH, SEP and Z-SEP.
//!
//! Every round has the same skeleton: elect heads, associate the remaining
//! participants with their nearest head, then charge members for the uplink
//! to their head and heads for reception, aggregation and the single
//! aggregated packet to the base station. Rounds with no elected head fall
//! back to direct transmission. Z-SEP additionally sends every normal node's
//! packet straight to the base station and clusters advance nodes only.

use serde::Serialize;

use crate::election::{p_advance, p_normal, ElectionState};
use crate::error::ConfigError;
use crate::model::{
    distance, Node, NodeKind, Position, Protocol, RadioParams, ScenarioConfig, UnitDraw,
};
use crate::radio::{aggregation_energy, rx_energy, tx_energy};

/// Node state plus the fixed geometry and radio a round needs.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub nodes: Vec<Node>,
    pub bs: Position,
    pub radio: RadioParams,
}

impl World {
    pub fn new(nodes: Vec<Node>, bs: Position, radio: RadioParams) -> Self {
        Self { nodes, bs, radio }
    }

    pub fn alive_ids(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].alive)
            .collect()
    }

    fn alive_of(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].alive && self.nodes[i].kind == kind)
            .collect()
    }

    pub fn alive_count(&self, kind: NodeKind) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.alive && n.kind == kind)
            .count()
    }

    pub fn residual_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.energy).sum()
    }

    fn charge(&mut self, id: usize, joules: f64, out: &mut RoundOutcome) {
        out.energy_spent += self.nodes[id].drain(joules);
    }

    fn tx_to_bs(&mut self, id: usize, out: &mut RoundOutcome) {
        let d = distance(self.nodes[id].pos, self.bs);
        let cost = tx_energy(self.radio.packet_bits, d, &self.radio);
        self.charge(id, cost, out);
        out.packets_to_bs += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub head: usize,
    pub members: Vec<usize>,
}

/// Counters and energy for a single round.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub packets_to_bs: u64,
    pub packets_to_ch: u64,
    pub ch_count: u64,
    pub energy_spent: f64,
}

impl RoundOutcome {
    fn absorb(&mut self, other: RoundOutcome) {
        self.packets_to_bs += other.packets_to_bs;
        self.packets_to_ch += other.packets_to_ch;
        self.ch_count += other.ch_count;
        self.energy_spent += other.energy_spent;
    }
}

/// Associates each of `others` with its nearest head; ties go to the lowest
/// head id. Returns one cluster per head, ordered by head id.
pub fn form_clusters(nodes: &[Node], heads: &[usize], others: &[usize]) -> Vec<Cluster> {
    let mut sorted = heads.to_vec();
    sorted.sort_unstable_by_key(|&h| nodes[h].id);
    let mut clusters: Vec<Cluster> = sorted
        .iter()
        .map(|&head| Cluster {
            head,
            members: Vec::new(),
        })
        .collect();
    if clusters.is_empty() {
        return clusters;
    }
    for &o in others {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (slot, c) in clusters.iter().enumerate() {
            let d = distance(nodes[o].pos, nodes[c.head].pos);
            if d < best_d {
                best_d = d;
                best = slot;
            }
        }
        clusters[best].members.push(o);
    }
    clusters
}

/// Charges the data-plane costs of the given clusters.
pub fn run_cluster_round(world: &mut World, clusters: &[Cluster]) -> RoundOutcome {
    let mut out = RoundOutcome::default();
    let k = world.radio.packet_bits;
    for c in clusters {
        let head_pos = world.nodes[c.head].pos;
        for &m in &c.members {
            let cost = tx_energy(k, distance(world.nodes[m].pos, head_pos), &world.radio);
            world.charge(m, cost, &mut out);
            out.packets_to_ch += 1;
        }
        let rx = rx_energy(k, &world.radio) * c.members.len() as f64;
        let agg = aggregation_energy(k, c.members.len() + 1, &world.radio);
        world.charge(c.head, rx + agg, &mut out);
        world.tx_to_bs(c.head, &mut out);
        out.ch_count += 1;
    }
    out
}

/// Clusters `participants` around `heads`, or sends every participant's
/// packet directly to the base station when no head was elected.
fn clustered_or_direct(world: &mut World, participants: &[usize], heads: &[usize]) -> RoundOutcome {
    if heads.is_empty() {
        let mut out = RoundOutcome::default();
        for &i in participants {
            world.tx_to_bs(i, &mut out);
        }
        return out;
    }
    let others: Vec<usize> = participants
        .iter()
        .copied()
        .filter(|i| !heads.contains(i))
        .collect();
    let clusters = form_clusters(&world.nodes, heads, &others);
    run_cluster_round(world, &clusters)
}

/// LEACH with heterogeneous batteries: one election class over every node.
pub fn leach_round(
    world: &mut World,
    class: &ElectionState,
    r: u64,
    rng: &mut impl UnitDraw,
) -> RoundOutcome {
    let alive = world.alive_ids();
    let heads = class.elect_heads(&mut world.nodes, &alive, r, rng);
    clustered_or_direct(world, &alive, &heads)
}

/// SEP: separate weighted election classes for normal and advance nodes,
/// clustering over the union.
pub fn sep_round(
    world: &mut World,
    normal: &ElectionState,
    advance: &ElectionState,
    r: u64,
    rng: &mut impl UnitDraw,
) -> RoundOutcome {
    let alive = world.alive_ids();
    let normals = world.alive_of(NodeKind::Normal);
    let advanced = world.alive_of(NodeKind::Advance);
    let mut heads = normal.elect_heads(&mut world.nodes, &normals, r, rng);
    heads.extend(advance.elect_heads(&mut world.nodes, &advanced, r, rng));
    clustered_or_direct(world, &alive, &heads)
}

/// Z-SEP: normal nodes transmit directly, advance nodes cluster among
/// themselves.
pub fn zsep_round(
    world: &mut World,
    advance: &ElectionState,
    r: u64,
    rng: &mut impl UnitDraw,
) -> RoundOutcome {
    let normals = world.alive_of(NodeKind::Normal);
    let advanced = world.alive_of(NodeKind::Advance);
    let mut out = RoundOutcome::default();
    for &i in &normals {
        world.tx_to_bs(i, &mut out);
    }
    let heads = advance.elect_heads(&mut world.nodes, &advanced, r, rng);
    out.absorb(clustered_or_direct(world, &advanced, &heads));
    out
}

/// Protocol-specific election classes for a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundEngine {
    Leach {
        all: ElectionState,
    },
    Sep {
        normal: ElectionState,
        advance: ElectionState,
    },
    Zsep {
        advance: ElectionState,
    },
}

impl RoundEngine {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, ConfigError> {
        Self::for_protocol(cfg.protocol, cfg.p_opt, cfg.m, cfg.alpha)
    }

    pub fn for_protocol(
        protocol: Protocol,
        p_opt: f64,
        m: f64,
        alpha: f64,
    ) -> Result<Self, ConfigError> {
        Ok(match protocol {
            Protocol::Leach => RoundEngine::Leach {
                all: ElectionState::new(p_opt)?,
            },
            Protocol::Sep => RoundEngine::Sep {
                normal: ElectionState::new(p_normal(p_opt, m, alpha))?,
                advance: ElectionState::new(p_advance(p_opt, m, alpha)?)?,
            },
            Protocol::Zsep => RoundEngine::Zsep {
                advance: ElectionState::new(p_advance(p_opt, m, alpha)?)?,
            },
        })
    }

    /// Election class a node of `kind` belongs to, if it is ever a candidate.
    pub fn class_of(&self, kind: NodeKind) -> Option<&ElectionState> {
        match (self, kind) {
            (RoundEngine::Leach { all }, _) => Some(all),
            (RoundEngine::Sep { normal, .. }, NodeKind::Normal) => Some(normal),
            (RoundEngine::Sep { advance, .. }, NodeKind::Advance) => Some(advance),
            (RoundEngine::Zsep { .. }, NodeKind::Normal) => None,
            (RoundEngine::Zsep { advance }, NodeKind::Advance) => Some(advance),
        }
    }

    pub fn play(&self, world: &mut World, r: u64, rng: &mut impl UnitDraw) -> RoundOutcome {
        match self {
            RoundEngine::Leach { all } => leach_round(world, all, r, rng),
            RoundEngine::Sep { normal, advance } => sep_round(world, normal, advance, r, rng),
            RoundEngine::Zsep { advance } => zsep_round(world, advance, r, rng),
        }
    }
}
