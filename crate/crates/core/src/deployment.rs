//! Node placement: uniform over the whole field for LEACH and SEP, banded
//! by Y coordinate for Z-SEP.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{initial_energy, Node, NodeKind, Position, ScenarioConfig, UnitDraw};

/// Z-SEP field bands as fractions of field height. Each band is open below
/// and closed above.
///
/// * head zone 1: `(0, 0.2]`
/// * zone 0: `(0.2, 0.8]`
/// * head zone 2: `(0.8, 1.0]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneLayout {
    pub zone0_y: (f64, f64),
    pub head_zone1_y: (f64, f64),
    pub head_zone2_y: (f64, f64),
}

impl Default for ZoneLayout {
    fn default() -> Self {
        Self {
            zone0_y: (0.2, 0.8),
            head_zone1_y: (0.0, 0.2),
            head_zone2_y: (0.8, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Zone0,
    HeadZone1,
    HeadZone2,
}

impl ZoneLayout {
    fn band(&self, zone: Zone) -> (f64, f64) {
        match zone {
            Zone::Zone0 => self.zone0_y,
            Zone::HeadZone1 => self.head_zone1_y,
            Zone::HeadZone2 => self.head_zone2_y,
        }
    }

    /// Y bounds of `zone` in meters for a field of the given height.
    pub fn bounds(&self, zone: Zone, field_height: f64) -> (f64, f64) {
        let (lo, hi) = self.band(zone);
        (lo * field_height, hi * field_height)
    }

    /// Zone containing `y`, or `None` outside `(0, field_height]`.
    pub fn zone_of(&self, y: f64, field_height: f64) -> Option<Zone> {
        [Zone::HeadZone1, Zone::Zone0, Zone::HeadZone2]
            .into_iter()
            .find(|&z| {
                let (lo, hi) = self.bounds(z, field_height);
                y > lo && y <= hi
            })
    }
}

/// Uniform sample in `(lo, hi]`.
fn sample_open_closed(lo: f64, hi: f64, rng: &mut impl UnitDraw) -> f64 {
    let y = hi - rng.next_unit() * (hi - lo);
    // Rounding can land exactly on the excluded bound.
    if y > lo {
        y
    } else {
        lo.next_up()
    }
}

fn kinds(cfg: &ScenarioConfig) -> impl Iterator<Item = NodeKind> {
    let a = cfg.advance_count();
    let normals = cfg.n - a;
    std::iter::repeat_n(NodeKind::Normal, normals).chain(std::iter::repeat_n(NodeKind::Advance, a))
}

/// Places every node i.i.d. uniformly over the full field. Normal nodes take
/// the low ids, advance nodes the high ids.
pub fn deploy_uniform(cfg: &ScenarioConfig, rng: &mut impl UnitDraw) -> Vec<Node> {
    kinds(cfg)
        .enumerate()
        .map(|(id, kind)| {
            let x = rng.next_unit() * cfg.field_width;
            let y = rng.next_unit() * cfg.field_height;
            Node::new(
                id,
                kind,
                Position::new(x, y),
                initial_energy(kind, cfg.e0, cfg.alpha),
            )
        })
        .collect()
}

/// Places normal nodes in zone 0 and splits advance nodes between the two
/// head zones, head zone 1 taking the extra node when the count is odd.
pub fn deploy_zonal(cfg: &ScenarioConfig, rng: &mut impl UnitDraw) -> Vec<Node> {
    let layout = ZoneLayout::default();
    let a = cfg.advance_count();
    let zone1_share = a.div_ceil(2);
    let mut advance_seen = 0;
    kinds(cfg)
        .enumerate()
        .map(|(id, kind)| {
            let zone = match kind {
                NodeKind::Normal => Zone::Zone0,
                NodeKind::Advance => {
                    advance_seen += 1;
                    if advance_seen <= zone1_share {
                        Zone::HeadZone1
                    } else {
                        Zone::HeadZone2
                    }
                }
            };
            let (lo, hi) = layout.bounds(zone, cfg.field_height);
            let x = rng.next_unit() * cfg.field_width;
            let y = sample_open_closed(lo, hi, rng);
            Node::new(
                id,
                kind,
                Position::new(x, y),
                initial_energy(kind, cfg.e0, cfg.alpha),
            )
        })
        .collect()
}

/// Serializes a deployment as one `id,kind,x,y,energy` line per node.
pub fn format_nodes(nodes: &[Node]) -> String {
    let mut out = String::from("# id,kind,x,y,energy\n");
    for n in nodes {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            n.id,
            n.kind.as_str(),
            n.pos.x,
            n.pos.y,
            n.energy
        );
    }
    out
}

/// Inverse of [`format_nodes`]. Blank lines and `#` comments are skipped.
pub fn parse_nodes(text: &str) -> Result<Vec<Node>> {
    let mut nodes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(parse_err(format!(
                "expected 5 fields, found {}",
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("field {}: {e}", i + 1)))
        };
        let id = fields[0]
            .parse::<usize>()
            .map_err(|e| parse_err(format!("id: {e}")))?;
        let kind = fields[1].parse::<NodeKind>().map_err(parse_err)?;
        let energy = num(4)?;
        if energy < 0.0 {
            return Err(parse_err(format!("negative energy {energy}")));
        }
        nodes.push(Node::new(id, kind, Position::new(num(2)?, num(3)?), energy));
    }
    Ok(nodes)
}

pub fn write_nodes(path: &Path, nodes: &[Node]) -> Result<()> {
    fs::write(path, format_nodes(nodes)).map_err(|e| Error::io(path, e))
}

pub fn read_nodes(path: &Path) -> Result<Vec<Node>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_nodes(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RandomSource;

    fn cfg(n: usize, m: f64) -> ScenarioConfig {
        ScenarioConfig {
            n,
            m,
            ..ScenarioConfig::default()
        }
    }

    fn count(nodes: &[Node], kind: NodeKind) -> usize {
        nodes.iter().filter(|n| n.kind == kind).count()
    }

    #[test]
    fn uniform_counts_and_bounds() {
        for (n, m, normals, advance) in [(100, 0.2, 80, 20), (1, 0.0, 1, 0), (100, 0.1, 90, 10)] {
            let c = cfg(n, m);
            let nodes = deploy_uniform(&c, &mut RandomSource::new(3));
            assert_eq!(nodes.len(), n);
            assert_eq!(count(&nodes, NodeKind::Normal), normals);
            assert_eq!(count(&nodes, NodeKind::Advance), advance);
            for node in &nodes {
                assert!((0.0..=100.0).contains(&node.pos.x));
                assert!((0.0..=100.0).contains(&node.pos.y));
                assert_eq!(node.energy, initial_energy(node.kind, c.e0, c.alpha));
                assert!(node.alive);
            }
        }
    }

    #[test]
    fn zonal_counts_per_zone() {
        let layout = ZoneLayout::default();
        for (n, m, normals, z1, z2) in [
            (100, 0.2, 80, 10, 10),
            (100, 0.1, 90, 5, 5),
            (2, 0.5, 1, 1, 0),
        ] {
            let nodes = deploy_zonal(&cfg(n, m), &mut RandomSource::new(9));
            let zone = |z| {
                nodes
                    .iter()
                    .filter(|nd| layout.zone_of(nd.pos.y, 100.0) == Some(z))
                    .count()
            };
            assert_eq!(count(&nodes, NodeKind::Normal), normals);
            assert_eq!(zone(Zone::Zone0), normals);
            assert_eq!(zone(Zone::HeadZone1), z1);
            assert_eq!(zone(Zone::HeadZone2), z2);
        }
    }

    #[test]
    fn zone_bounds_are_open_closed() {
        let layout = ZoneLayout::default();
        assert_eq!(layout.zone_of(20.0, 100.0), Some(Zone::HeadZone1));
        assert_eq!(layout.zone_of(20.000001, 100.0), Some(Zone::Zone0));
        assert_eq!(layout.zone_of(80.0, 100.0), Some(Zone::Zone0));
        assert_eq!(layout.zone_of(100.0, 100.0), Some(Zone::HeadZone2));
        assert_eq!(layout.zone_of(0.0, 100.0), None);
    }

    #[test]
    fn zonal_extremes_of_the_draw() {
        // A draw of 0 lands on the closed upper bound, a draw just below 1
        // stays strictly above the open lower bound.
        struct Fixed(f64);
        impl UnitDraw for Fixed {
            fn next_unit(&mut self) -> f64 {
                self.0
            }
        }
        let layout = ZoneLayout::default();
        for u in [0.0, 1.0 - f64::EPSILON / 2.0] {
            for node in deploy_zonal(&cfg(100, 0.2), &mut Fixed(u)) {
                let zone = layout.zone_of(node.pos.y, 100.0).unwrap();
                match node.kind {
                    NodeKind::Normal => assert_eq!(zone, Zone::Zone0),
                    NodeKind::Advance => assert_ne!(zone, Zone::Zone0),
                }
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(100, 0.2);
        assert_eq!(
            deploy_zonal(&c, &mut RandomSource::new(5)),
            deploy_zonal(&c, &mut RandomSource::new(5))
        );
        assert_eq!(
            deploy_uniform(&c, &mut RandomSource::new(5)),
            deploy_uniform(&c, &mut RandomSource::new(5))
        );
        assert_ne!(
            deploy_uniform(&c, &mut RandomSource::new(5)),
            deploy_uniform(&c, &mut RandomSource::new(6))
        );
    }

    #[test]
    fn node_list_round_trip() {
        let nodes = deploy_zonal(&cfg(30, 0.3), &mut RandomSource::new(1));
        let text = format_nodes(&nodes);
        let back = parse_nodes(&text).unwrap();
        assert_eq!(back, nodes);
        assert_eq!(format_nodes(&back), text);
    }

    #[test]
    fn node_list_rejects_garbage() {
        assert!(matches!(
            parse_nodes("0,normal,1,2"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_nodes("# c\n0,relay,1,2,3").is_err());
        assert!(parse_nodes("0,normal,1,2,-1").is_err());
    }
}
