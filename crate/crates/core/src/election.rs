//! Cluster-head election with a rotating threshold.
//!
//! Each probability class (all nodes for LEACH, normal and advance nodes
//! separately for SEP, advance nodes only for Z-SEP) runs its own epoch of
//! `round(1/p)` rounds. Within an epoch a node serves at most once; the
//! threshold climbs as the epoch progresses and reaches 1 on its last round,
//! so every candidate that survives the epoch serves exactly once.

use crate::error::ConfigError;
use crate::model::{Node, UnitDraw};

/// `k_opt / n`.
pub fn p_optimal(k_opt: usize, n: usize) -> f64 {
    k_opt as f64 / n as f64
}

/// Weighted election probability of advance nodes,
/// `p_opt * (1 + alpha) / (1 + alpha * m)`.
pub fn p_advance(p_opt: f64, m: f64, alpha: f64) -> Result<f64, ConfigError> {
    let p = p_opt * (1.0 + alpha) / (1.0 + alpha * m);
    if p > 1.0 {
        return Err(ConfigError::ProbabilityAboveOne(p));
    }
    Ok(p)
}

/// Weighted election probability of normal nodes, `p_opt / (1 + alpha * m)`.
pub fn p_normal(p_opt: f64, m: f64, alpha: f64) -> f64 {
    p_opt / (1.0 + alpha * m)
}

/// Rounds per epoch for probability `p`, `1/p` rounded to nearest.
pub fn epoch_length(p: f64) -> u64 {
    ((1.0 / p).round() as u64).max(1)
}

/// Rotating threshold for round `r`; zero for nodes that already served in
/// the current epoch.
pub fn threshold(p: f64, r: u64, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let phase = (r % epoch_length(p)) as f64;
    let denom = 1.0 - p * phase;
    debug_assert!(
        denom > 0.0,
        "threshold denominator {denom} for p={p}, r={r}"
    );
    p / denom
}

/// Election state of one probability class. Per-node eligibility lives on
/// [`Node::ch_count_this_epoch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectionState {
    pub p: f64,
    pub epoch_length: u64,
}

impl ElectionState {
    pub fn new(p: f64) -> Result<Self, ConfigError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "election probability",
                value: p,
                expected: "(0, 1]",
            });
        }
        Ok(Self {
            p,
            epoch_length: epoch_length(p),
        })
    }

    /// Runs one round of election over `candidates` (indices into `nodes`).
    ///
    /// Dead candidates are skipped. On an epoch boundary every live candidate
    /// becomes eligible again. One draw is consumed per live candidate, in
    /// the order given, and a candidate is elected iff it is eligible and the
    /// draw is at most its threshold. Returns elected indices in candidate
    /// order.
    pub fn elect_heads(
        &self,
        nodes: &mut [Node],
        candidates: &[usize],
        r: u64,
        rng: &mut impl UnitDraw,
    ) -> Vec<usize> {
        let phase = r % self.epoch_length;
        let mut heads = Vec::new();
        for &i in candidates {
            let node = &mut nodes[i];
            if !node.alive {
                continue;
            }
            if phase == 0 {
                node.ch_count_this_epoch = 0;
            }
            node.rounds_since_epoch_start = phase;
            let eligible = node.ch_count_this_epoch == 0;
            let draw = rng.next_unit();
            if eligible && draw <= threshold(self.p, r, true) {
                node.ch_count_this_epoch += 1;
                heads.push(i);
            }
        }
        heads
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NodeKind, Position, RandomSource, ScriptedDraws};

    fn nodes(n: usize) -> Vec<Node> {
        (0..n)
            .map(|i| Node::new(i, NodeKind::Advance, Position::new(i as f64, 0.0), 1.0))
            .collect()
    }

    #[test]
    fn p_optimal_examples() {
        assert!((p_optimal(2, 20) - 0.1).abs() < 1e-15);
        assert_eq!(p_optimal(1, 1), 1.0);
        assert!((p_optimal(10, 100) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn weighted_probabilities() {
        assert!((p_advance(0.1, 0.2, 1.0).unwrap() - 0.2 / 1.2).abs() < 1e-15);
        assert!((p_advance(0.1, 0.7, 0.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((p_advance(0.1, 0.1, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((p_normal(0.1, 0.2, 1.0) - 0.1 / 1.2).abs() < 1e-15);
        assert!((p_normal(0.1, 0.3, 0.0) - 0.1).abs() < 1e-15);
        assert!((p_normal(0.1, 0.1, 2.0) - 0.1 / 1.2).abs() < 1e-15);
        assert!(matches!(
            p_advance(0.6, 0.0, 1.0),
            Err(ConfigError::ProbabilityAboveOne(_))
        ));
    }

    #[test]
    fn epoch_lengths() {
        assert_eq!(epoch_length(0.1), 10);
        assert_eq!(epoch_length(p_normal(0.1, 0.2, 1.0)), 12);
        assert_eq!(epoch_length(p_advance(0.1, 0.2, 1.0).unwrap()), 6);
        assert_eq!(epoch_length(0.25), 4);
        assert_eq!(epoch_length(1.0), 1);
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold(0.1, 0, true) - 0.1).abs() < 1e-12);
        assert!((threshold(0.1, 15, true) - 0.2).abs() < 1e-12);
        assert!((threshold(0.1, 9, true) - 1.0).abs() < 1e-12);
        assert_eq!(threshold(0.1, 9, false), 0.0);
        assert_eq!(threshold(0.7, 123, false), 0.0);
    }

    #[test]
    fn threshold_reaches_one_on_last_epoch_round() {
        for p in [
            0.1,
            p_normal(0.1, 0.2, 1.0),
            p_advance(0.1, 0.2, 1.0).unwrap(),
            0.25,
            0.5,
            1.0,
        ] {
            let last = epoch_length(p) - 1;
            assert!(threshold(p, last, true) >= 1.0 - 1e-12, "p={p}");
        }
    }

    #[test]
    fn threshold_is_non_decreasing_within_epoch() {
        for p in [0.05, 0.1, 0.13, 1.0 / 6.0, 0.3, 0.45] {
            let len = epoch_length(p);
            for r in 1..len {
                assert!(threshold(p, r, true) >= threshold(p, r - 1, true));
            }
        }
    }

    #[test]
    fn threshold_one_elects_all_eligible() {
        let mut ns = nodes(10);
        let ids: Vec<usize> = (0..10).collect();
        let state = ElectionState::new(1.0).unwrap();
        let heads = state.elect_heads(&mut ns, &ids, 0, &mut ScriptedDraws::new(vec![0.999]));
        assert_eq!(heads, ids);
    }

    #[test]
    fn no_candidates_no_heads() {
        let mut ns = nodes(3);
        let state = ElectionState::new(0.1).unwrap();
        let mut rng = ScriptedDraws::new(vec![0.0]);
        assert!(state.elect_heads(&mut ns, &[], 0, &mut rng).is_empty());
        assert_eq!(rng.consumed(), 0);
    }

    #[test]
    fn ineligible_never_elected_even_on_zero_draw() {
        let mut ns = nodes(1);
        ns[0].ch_count_this_epoch = 1;
        let state = ElectionState::new(0.1).unwrap();
        let heads = state.elect_heads(&mut ns, &[0], 3, &mut ScriptedDraws::new(vec![0.0]));
        assert!(heads.is_empty());
    }

    #[test]
    fn dead_candidates_skipped_without_draw() {
        let mut ns = nodes(2);
        ns[0].alive = false;
        ns[0].energy = 0.0;
        let state = ElectionState::new(1.0).unwrap();
        let mut rng = ScriptedDraws::new(vec![0.5]);
        assert_eq!(state.elect_heads(&mut ns, &[0, 1], 0, &mut rng), vec![1]);
        assert_eq!(rng.consumed(), 1);
    }

    #[test]
    fn every_candidate_serves_once_per_epoch() {
        for p in [
            0.1,
            p_normal(0.1, 0.2, 1.0),
            p_advance(0.1, 0.1, 2.0).unwrap(),
        ] {
            let state = ElectionState::new(p).unwrap();
            let mut ns = nodes(20);
            let ids: Vec<usize> = (0..20).collect();
            let mut rng = RandomSource::new(11);
            for epoch in 0..10 {
                let mut served = [0u32; 20];
                for phase in 0..state.epoch_length {
                    let r = epoch * state.epoch_length + phase;
                    for h in state.elect_heads(&mut ns, &ids, r, &mut rng) {
                        served[h] += 1;
                    }
                }
                assert!(
                    served.iter().all(|&c| c == 1),
                    "p={p} epoch={epoch} {served:?}"
                );
            }
        }
    }

    #[test]
    fn mean_heads_per_round_matches_p() {
        // 20 candidates over 10^4 rounds: each serves once per epoch, so the
        // mean head count per round is 20 / epoch_length ~= 20 * p.
        let p = p_advance(0.1, 0.2, 1.0).unwrap();
        let state = ElectionState::new(p).unwrap();
        let mut ns = nodes(20);
        let ids: Vec<usize> = (0..20).collect();
        let mut rng = RandomSource::new(2024);
        let rounds = 12_000u64;
        let total: usize = (0..rounds)
            .map(|r| state.elect_heads(&mut ns, &ids, r, &mut rng).len())
            .sum();
        let mean = total as f64 / rounds as f64;
        assert!((mean - 20.0 * p).abs() < 0.05, "mean {mean}");
    }
}
