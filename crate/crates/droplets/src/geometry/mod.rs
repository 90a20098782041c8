//! Exact planar geometry of single, double and triple bubbles.
//!
//! A bubble is a cluster of up to three lobes bounded by circular arcs.
//! Outer arcs carry curvature `1/r_i` where `r_i` is the lobe radius; each
//! internal wall between lobes `i < j` carries the signed curvature
//! `kappa_j - kappa_i`, so the reciprocal relations hold as identities. All
//! solvers reproduce the prescribed lobe areas to near machine precision and
//! return the full arc system together with the cluster perimeter.

mod double;
mod march;
mod record;
mod single;
mod triple;
mod validate;

pub use record::GeometryRecord;
pub use validate::{validate, GeometryChecks};

use crate::error::{Error, Result};
use crate::vec2::V2;
use serde::{Deserialize, Serialize};

pub(crate) use march::{green_leg, march, sin_rem};
pub(crate) use march::unit_segment;


/// Relative mass ratio below which a lobe is treated as degenerate and the
/// cluster is dispatched to the lower-order solver.
pub const DEGENERACY_RATIO: f64 = 1e-9;

/// Zero pattern of a mass triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BubbleKind {
    /// One positive lobe; holds its type index (0-based).
    Single(usize),
    /// Two positive lobes `(i, j)` with `i < j`.
    Double(usize, usize),
    /// All three lobes positive.
    Triple,
}

impl BubbleKind {
    pub fn lobe_count(&self) -> usize {
        match self {
            BubbleKind::Single(_) => 1,
            BubbleKind::Double(_, _) => 2,
            BubbleKind::Triple => 3,
        }
    }
}

/// Per-bubble lobe masses `(m1, m2, m3)` with kind derived from the zero
/// pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassTriple {
    m: [f64; 3],
}

impl MassTriple {
    /// Validates nonnegativity and that at least one lobe is positive.
    pub fn new(m: [f64; 3]) -> Result<MassTriple> {
        if m.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain(format!(
                "lobe masses must be finite and nonnegative, got {m:?}"
            )));
        }
        if m.iter().all(|v| *v == 0.0) {
            return Err(Error::domain("at least one lobe mass must be positive"));
        }
        Ok(MassTriple { m })
    }

    pub fn single(i: usize, m: f64) -> Result<MassTriple> {
        let mut v = [0.0; 3];
        v[i] = m;
        MassTriple::new(v)
    }

    pub fn masses(&self) -> [f64; 3] {
        self.m
    }

    pub fn get(&self, i: usize) -> f64 {
        self.m[i]
    }

    pub fn total(&self) -> f64 {
        self.m[0] + self.m[1] + self.m[2]
    }

    /// Kind from the exact zero pattern.
    pub fn kind(&self) -> BubbleKind {
        let pos: Vec<usize> = (0..3).filter(|&i| self.m[i] > 0.0).collect();
        match pos.as_slice() {
            [i] => BubbleKind::Single(*i),
            [i, j] => BubbleKind::Double(*i, *j),
            _ => BubbleKind::Triple,
        }
    }

    /// Kind after collapsing lobes below the degeneracy ratio.
    pub fn effective_kind(&self) -> BubbleKind {
        let max = self.m.iter().cloned().fold(0.0f64, f64::max);
        let pos: Vec<usize> = (0..3)
            .filter(|&i| self.m[i] > DEGENERACY_RATIO * max)
            .collect();
        match pos.as_slice() {
            [i] => BubbleKind::Single(*i),
            [i, j] => BubbleKind::Double(*i, *j),
            _ => BubbleKind::Triple,
        }
    }
}

/// One leg of a lobe's boundary walk: start point, unit start tangent,
/// signed curvature (positive turns left) and arc length. Lobe boundaries
/// are traversed counter-clockwise, so the lobe lies on the left.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryLeg {
    pub start: V2,
    pub tangent: V2,
    pub curvature: f64,
    pub length: f64,
}

impl BoundaryLeg {
    pub fn end(&self) -> V2 {
        march(self.start, self.tangent, self.curvature, self.length).0
    }

    /// Point and unit tangent at fraction `t` of the arc length.
    pub fn at(&self, t: f64) -> (V2, V2) {
        march(self.start, self.tangent, self.curvature, t * self.length)
    }

    /// Green's-theorem area contribution of this leg.
    pub fn green_area(&self) -> f64 {
        green_leg(self.start, self.end(), self.curvature, self.length)
    }
}

/// One circular arc of a cluster. `curvature` is `1/r` for outer arcs and the
/// signed difference `kappa_j - kappa_i` for the wall between lobes `i < j`
/// (positive means the wall bulges into lobe `i`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Arc {
    pub curvature: f64,
    /// Arc angle in radians (2*pi for a full circle).
    pub angle: f64,
    /// Chord length between the arc endpoints (0 for a full circle).
    pub chord: f64,
    /// Arc length.
    pub length: f64,
    /// Circle center; `None` encodes a straight wall.
    pub center: Option<V2>,
    /// Endpoints in traversal order; `None` for a full circle.
    pub endpoints: Option<(V2, V2)>,
}

/// Arc slot layout: slots 0..3 are the outer arcs of lobes 1..3; slots 3..6
/// are the walls between lobe pairs (1,2), (1,3), (2,3).
pub fn wall_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 3,
        (0, 2) => 4,
        (1, 2) => 5,
        _ => panic!("invalid lobe pair ({i}, {j})"),
    }
}

/// Full arc-system description of a solved bubble cluster.
///
/// Coordinates are in the canonical frame: the first junction sits at the
/// origin and the first wall leaves it along the +y axis. For a triple
/// bubble the first junction is the central one where the three walls meet;
/// junctions are ordered `[center, J12, J13, J23]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterGeometry {
    pub kind: BubbleKind,
    /// The solved lobe masses (zero entries for absent lobes).
    pub masses: [f64; 3],
    pub arcs: [Option<Arc>; 6],
    pub junctions: Vec<V2>,
    /// Angles between wall chords at the central junction (triple only):
    /// `[s4, s5, s6]` between chords of walls (1,2)&(1,3), (1,2)&(2,3),
    /// (1,3)&(2,3).
    pub junction_angles: Option<[f64; 3]>,
    pub perimeter: f64,
    /// Counter-clockwise boundary walk of each present lobe.
    pub lobes: [Option<Vec<BoundaryLeg>>; 3],
    /// Set when the requested masses were collapsed to a lower-order cluster.
    pub degenerate: bool,
}

impl ClusterGeometry {
    /// Outer radius of lobe `i`, when the lobe is present.
    pub fn outer_radius(&self, i: usize) -> Option<f64> {
        self.arcs[i].map(|a| 1.0 / a.curvature)
    }

    /// Outer curvature `1/r_i` of lobe `i`, when present.
    pub fn outer_curvature(&self, i: usize) -> Option<f64> {
        self.arcs[i].map(|a| a.curvature)
    }

    /// Lobe areas recomputed from the circular-segment formulas (chord +
    /// segment decomposition). Used for the area round-trip invariant.
    pub fn segment_area_masses(&self) -> [f64; 3] {
        validate::segment_areas(self)
    }

    pub fn to_record(&self) -> GeometryRecord {
        GeometryRecord::from(self)
    }

    /// Reference point for placement: the circle center for a single bubble,
    /// the junction centroid otherwise.
    pub fn anchor(&self) -> V2 {
        if self.junctions.is_empty() {
            for arc in self.arcs.iter().flatten() {
                if let Some(c) = arc.center {
                    return c;
                }
            }
            return V2::ZERO;
        }
        let mut sum = V2::ZERO;
        for &j in &self.junctions {
            sum = sum + j;
        }
        sum * (1.0 / self.junctions.len() as f64)
    }

    /// Radius of a disk around the anchor guaranteed to contain the cluster
    /// (tight for singles, slightly conservative otherwise).
    pub fn enclosing_radius(&self) -> f64 {
        let anchor = self.anchor();
        let mut rad = 0.0f64;
        for legs in self.lobes.iter().flatten() {
            for leg in legs {
                let start_d = (leg.start - anchor).norm();
                let end_d = (leg.end() - anchor).norm();
                let chord_bound = start_d.max(end_d)
                    + leg.curvature.abs() * leg.length * leg.length / 8.0;
                let bound = if leg.curvature.abs() > 1e-9 {
                    let center = leg.start + leg.tangent.perp() * (1.0 / leg.curvature);
                    chord_bound.min((center - anchor).norm() + 1.0 / leg.curvature.abs())
                } else {
                    chord_bound
                };
                rad = rad.max(bound);
            }
        }
        rad
    }
}

/// Solve a single bubble of mass `m`: a circle with `r = sqrt(m/pi)`.
pub fn solve_single(m: f64) -> Result<ClusterGeometry> {
    single::solve(0, m)
}

/// Single bubble of type `i` (places the circle arc in slot `i`).
pub fn solve_single_typed(i: usize, m: f64) -> Result<ClusterGeometry> {
    single::solve(i, m)
}

/// Solve the standard double bubble with lobe areas `mi`, `mj` in type slots
/// `(0, 1)`.
pub fn solve_double(mi: f64, mj: f64) -> Result<ClusterGeometry> {
    double::solve(0, 1, mi, mj)
}

/// Double bubble with explicit type slots `i < j`.
pub fn solve_double_typed(i: usize, j: usize, mi: f64, mj: f64) -> Result<ClusterGeometry> {
    double::solve(i, j, mi, mj)
}

/// Solve the cluster matching the zero pattern of `m` (dispatching degenerate
/// mass ratios to the lower-order solver, flagged in the output).
pub fn solve_cluster(m: &MassTriple) -> Result<ClusterGeometry> {
    let mut cache = TripleCache::new();
    solve_cluster_cached(&mut cache, m)
}

/// As [`solve_cluster`] but reusing a warm-start cache across calls.
pub fn solve_cluster_cached(cache: &mut TripleCache, m: &MassTriple) -> Result<ClusterGeometry> {
    let masses = m.masses();
    let effective = m.effective_kind();
    let degenerate = effective != m.kind();
    let mut geo = match effective {
        BubbleKind::Single(i) => single::solve(i, masses[i])?,
        BubbleKind::Double(i, j) => double::solve(i, j, masses[i], masses[j])?,
        BubbleKind::Triple => triple::solve(cache, masses)?,
    };
    geo.degenerate = degenerate;
    Ok(geo)
}

/// Solve a genuine triple bubble (all lobes positive).
pub fn solve_triple(m: &MassTriple) -> Result<ClusterGeometry> {
    if m.kind() != BubbleKind::Triple {
        return Err(Error::domain("solve_triple requires all three lobes positive"));
    }
    solve_cluster(m)
}

/// Perimeter derivative `(dp/dm1, dp/dm2, dp/dm3) = (1/r1, 1/r2, 1/r3)`.
///
/// Entries for absent (or degenerate-collapsed) lobes are `None`: the
/// one-sided derivative at a vanishing lobe diverges, so the optimizer treats
/// those entries as inactive rather than numeric.
pub fn perimeter_gradient(m: &MassTriple) -> Result<[Option<f64>; 3]> {
    let geo = solve_cluster(m)?;
    Ok([
        geo.outer_curvature(0),
        geo.outer_curvature(1),
        geo.outer_curvature(2),
    ])
}

/// Cluster perimeter for the given masses.
pub fn perimeter(m: &MassTriple) -> Result<f64> {
    Ok(solve_cluster(m)?.perimeter)
}

/// Perimeter of the standard double bubble.
pub fn double_perimeter(mi: f64, mj: f64) -> Result<f64> {
    Ok(solve_double(mi, mj)?.perimeter)
}

/// Perimeter of a single bubble: `2 sqrt(pi m)`.
pub fn single_perimeter(m: f64) -> f64 {
    2.0 * (std::f64::consts::PI * m).sqrt()
}

/// Closed form for the equal-mass triple bubble: three straight walls of
/// length `2r/sqrt(3)` meeting at the center, three semicircular outer arcs
/// of radius `r`, lobe area `r^2 (pi/2 + 1/sqrt(3))`.
pub mod symmetric {
    use std::f64::consts::PI;

    /// Lobe area divided by r^2.
    pub fn area_coefficient() -> f64 {
        PI / 2.0 + 1.0 / 3f64.sqrt()
    }

    pub fn radius(m: f64) -> f64 {
        (m / area_coefficient()).sqrt()
    }

    /// Perimeter of the symmetric triple bubble with lobe mass `m` each.
    pub fn triple_perimeter(m: f64) -> f64 {
        (3.0 * PI + 2.0 * 3f64.sqrt()) * radius(m)
    }

    pub fn wall_length(m: f64) -> f64 {
        2.0 * radius(m) / 3f64.sqrt()
    }

    /// Perimeter of the equal-mass double bubble: two 240-degree arcs plus a
    /// straight wall, lobe area `r^2 (2 pi/3 + sqrt(3)/4)`.
    pub fn double_perimeter(m: f64) -> f64 {
        let coef = 2.0 * PI / 3.0 + 3f64.sqrt() / 4.0;
        (8.0 * PI / 3.0 + 3f64.sqrt()) * (m / coef).sqrt()
    }
}

/// Empirical comparability constants: extremes of `m_i / r_i^2` over all
/// lobes of the solved sample, certifying `c1 r^2 <= m <= c2 r^2` on it.
pub fn comparability_constants(sample_grid: &[MassTriple]) -> Result<(f64, f64)> {
    if sample_grid.is_empty() {
        return Err(Error::domain("comparability grid must be nonempty"));
    }
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut cache = TripleCache::new();
    for m in sample_grid {
        let geo = solve_cluster_cached(&mut cache, m)?;
        for i in 0..3 {
            if let Some(r) = geo.outer_radius(i) {
                let ratio = geo.masses[i] / (r * r);
                c1 = c1.min(ratio);
                c2 = c2.max(ratio);
            }
        }
    }
    Ok((c1, c2))
}

pub use triple::TripleCache;
