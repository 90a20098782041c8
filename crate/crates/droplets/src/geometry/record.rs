//! Flat serializable form of a solved geometry.

use super::{BubbleKind, ClusterGeometry};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Flat record of a cluster: slot arrays follow the library layout (slots
/// 1..3 outer arcs, 4..6 walls between lobe pairs (1,2), (1,3), (2,3));
/// absent arcs serialize as null. Coordinates are in the canonical frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryRecord {
    pub schema_version: u32,
    pub kind: String,
    /// 1-based type indices of the present lobes.
    pub lobes: Vec<usize>,
    pub masses: [f64; 3],
    pub degenerate: bool,
    pub perimeter: f64,
    pub curvatures: [Option<f64>; 6],
    pub arc_angles: [Option<f64>; 6],
    pub chords: [Option<f64>; 6],
    pub arc_lengths: [Option<f64>; 6],
    pub junction_angles: Option<[f64; 3]>,
    pub junctions: Vec<[f64; 2]>,
    pub centers: [Option<[f64; 2]>; 6],
}

impl From<&ClusterGeometry> for GeometryRecord {
    fn from(g: &ClusterGeometry) -> GeometryRecord {
        let mut curvatures = [None; 6];
        let mut arc_angles = [None; 6];
        let mut chords = [None; 6];
        let mut arc_lengths = [None; 6];
        let mut centers = [None; 6];
        for (slot, arc) in g.arcs.iter().enumerate() {
            if let Some(a) = arc {
                curvatures[slot] = Some(a.curvature);
                arc_angles[slot] = Some(a.angle);
                chords[slot] = Some(a.chord);
                arc_lengths[slot] = Some(a.length);
                centers[slot] = a.center.map(|c| [c.x, c.y]);
            }
        }
        let (kind, lobes) = match g.kind {
            BubbleKind::Single(i) => ("single".to_string(), vec![i + 1]),
            BubbleKind::Double(i, j) => ("double".to_string(), vec![i + 1, j + 1]),
            BubbleKind::Triple => ("triple".to_string(), vec![1, 2, 3]),
        };
        GeometryRecord {
            schema_version: SCHEMA_VERSION,
            kind,
            lobes,
            masses: g.masses,
            degenerate: g.degenerate,
            perimeter: g.perimeter,
            curvatures,
            arc_angles,
            chords,
            arc_lengths,
            junction_angles: g.junction_angles,
            junctions: g.junctions.iter().map(|p| [p.x, p.y]).collect(),
            centers,
        }
    }
}
