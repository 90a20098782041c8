//! Invariant checks on solved cluster geometries.
//!
//! These recompute everything from the stored arc system, independently of
//! how the solver produced it: lobe areas from the circular-segment
//! decomposition, junction angles from tangent reconstruction, the
//! reciprocal curvature relations, and center collinearity.

use super::{sin_rem, wall_slot, Arc, BubbleKind, ClusterGeometry};
use crate::vec2::V2;

#[derive(Debug, Clone, Copy)]
pub struct GeometryChecks {
    /// Max relative area error of the segment-formula round trip.
    pub area_rel_max: f64,
    /// Max deviation of junction angles from 2*pi/3, radians.
    pub junction_dev_max: f64,
    /// Max residual of the reciprocal curvature relations.
    pub reciprocal_max: f64,
    /// Max normalized center-collinearity residual.
    pub collinearity_max: f64,
}

/// Circular-segment area for an arc: `(theta - sin theta) r^2 / 2`, written
/// via the stable kernel so straight walls contribute exactly zero.
fn segment(arc: &Arc) -> f64 {
    let phi = arc.angle;
    0.5 * arc.curvature.abs() * arc.length.powi(3) * sin_rem(phi)
}

/// Lobe areas recomputed from segments, wall signs and chord triangles.
pub fn segment_areas(g: &ClusterGeometry) -> [f64; 3] {
    let mut areas = [0.0; 3];
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for i in 0..3 {
        let Some(outer) = &g.arcs[i] else { continue };
        let mut a = segment(outer);
        let mut wall_chords: Vec<f64> = Vec::new();
        for &(pi, pj) in &pairs {
            if pi != i && pj != i {
                continue;
            }
            if let Some(wall) = &g.arcs[wall_slot(pi, pj)] {
                // Positive stored curvature bulges into the lower-indexed
                // lobe, which therefore loses the segment.
                let sign = if wall.curvature == 0.0 {
                    0.0
                } else if (pi == i) == (wall.curvature > 0.0) {
                    -1.0
                } else {
                    1.0
                };
                a += sign * segment(wall);
                wall_chords.push(wall.chord);
            }
        }
        // Chord triangle at the central junction, signed through sin(s):
        // the wedge angle exceeds pi when the lobe wraps around.
        if let Some(s) = g.junction_angles {
            if wall_chords.len() == 2 {
                a += 0.5 * wall_chords[0] * wall_chords[1] * s[i].sin();
            }
        }
        areas[i] = a;
    }
    areas
}

/// Tangent ray of an arc at endpoint `q`, pointing along the arc away from
/// the junction. Straight walls use the chord; curved arcs pick the
/// perpendicular of the radius vector whose tangent-chord angle matches the
/// inscribed-angle relation `theta/2`.
fn tangent_ray(arc: &Arc, q: V2) -> Option<V2> {
    let (a, b) = arc.endpoints?;
    let other = if (q - a).norm() <= (q - b).norm() { b } else { a };
    let chord = other - q;
    match arc.center {
        None => Some(chord.unit()),
        Some(o) => {
            let radial = (q - o).unit();
            let chord_dir = chord.unit();
            let want = arc.angle / 2.0;
            let cand1 = radial.perp();
            let cand2 = -cand1;
            let dev = |c: V2| ((c.dot(chord_dir)).clamp(-1.0, 1.0).acos() - want).abs();
            if dev(cand1) <= dev(cand2) {
                Some(cand1)
            } else {
                Some(cand2)
            }
        }
    }
}

fn junction_deviation(g: &ClusterGeometry) -> f64 {
    let mut max_dev = 0.0f64;
    let tol_match = 1e-6;
    for &q in &g.junctions {
        // Collect rays of all arcs ending at this junction.
        let mut rays: Vec<V2> = Vec::new();
        for arc in g.arcs.iter().flatten() {
            if let Some((a, b)) = arc.endpoints {
                if (a - q).norm() < tol_match * (1.0 + q.norm())
                    || (b - q).norm() < tol_match * (1.0 + q.norm())
                {
                    if let Some(r) = tangent_ray(arc, q) {
                        rays.push(r);
                    }
                }
            }
        }
        if rays.len() != 3 {
            continue;
        }
        let mut angles: Vec<f64> = rays.iter().map(|r| r.angle()).collect();
        angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for k in 0..3 {
            let next = if k == 2 {
                angles[0] + std::f64::consts::TAU
            } else {
                angles[k + 1]
            };
            max_dev = max_dev.max((next - angles[k] - 2.0 * std::f64::consts::PI / 3.0).abs());
        }
    }
    max_dev
}

fn reciprocal_residual(g: &ClusterGeometry) -> f64 {
    let mut max_res = 0.0f64;
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let (Some(wall), Some(oi), Some(oj)) =
            (&g.arcs[wall_slot(i, j)], &g.arcs[i], &g.arcs[j])
        else {
            continue;
        };
        max_res = max_res.max((wall.curvature - (oj.curvature - oi.curvature)).abs());
    }
    max_res
}

fn collinearity_residual(g: &ClusterGeometry) -> f64 {
    if g.kind != BubbleKind::Triple {
        return 0.0;
    }
    let center = |slot: usize| g.arcs[slot].and_then(|a| a.center);
    let lines = [
        [center(0), center(1), center(3)],
        [center(0), center(2), center(4)],
        [center(1), center(2), center(5)],
        [center(3), center(4), center(5)],
    ];
    let mut max_res = 0.0f64;
    for line in lines {
        let [Some(a), Some(b), Some(c)] = line else {
            continue; // straight wall on this line
        };
        let base = b - a;
        let h = base.cross(c - a).abs() / base.norm();
        let scale = 1.0 + a.norm().max(b.norm()).max(c.norm());
        max_res = max_res.max(h / scale);
    }
    max_res
}

/// Run all geometry invariants and report the worst residual of each.
pub fn validate(g: &ClusterGeometry) -> GeometryChecks {
    let areas = segment_areas(g);
    let mut area_rel = 0.0f64;
    for i in 0..3 {
        // Degenerate dispatch drops sub-threshold lobes; skip those.
        if g.arcs[i].is_some() && g.masses[i] > 0.0 {
            area_rel = area_rel.max((areas[i] - g.masses[i]).abs() / g.masses[i]);
        }
    }
    GeometryChecks {
        area_rel_max: area_rel,
        junction_dev_max: junction_deviation(g),
        reciprocal_max: reciprocal_residual(g),
        collinearity_max: collinearity_residual(g),
    }
}
