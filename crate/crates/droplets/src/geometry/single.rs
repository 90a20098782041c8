//! The trivial cluster: one lobe, one circle.

use super::{Arc, BubbleKind, ClusterGeometry};
use crate::error::{Error, Result};
use crate::vec2::{v2, V2};
use std::f64::consts::{PI, TAU};

pub fn solve(i: usize, m: f64) -> Result<ClusterGeometry> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::domain(format!("single bubble mass must be positive, got {m}")));
    }
    let r = (m / PI).sqrt();
    let mut arcs: [Option<Arc>; 6] = [None; 6];
    arcs[i] = Some(Arc {
        curvature: 1.0 / r,
        angle: TAU,
        chord: 0.0,
        length: TAU * r,
        center: Some(V2::ZERO),
        endpoints: None,
    });
    let mut masses = [0.0; 3];
    masses[i] = m;
    let mut lobes: [Option<Vec<super::BoundaryLeg>>; 3] = Default::default();
    lobes[i] = Some(vec![super::BoundaryLeg {
        start: v2(r, 0.0),
        tangent: v2(0.0, 1.0),
        curvature: 1.0 / r,
        length: TAU * r,
    }]);
    Ok(ClusterGeometry {
        kind: BubbleKind::Single(i),
        masses,
        arcs,
        junctions: Vec::new(),
        junction_angles: None,
        perimeter: 2.0 * (PI * m).sqrt(),
        lobes,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle() {
        let g = solve(0, PI).unwrap();
        assert!((g.outer_radius(0).unwrap() - 1.0).abs() < 1e-15);
        assert!((g.perimeter - TAU).abs() < 1e-15);
    }

    #[test]
    fn scaling_and_formula() {
        let g = solve(0, 4.0 * PI).unwrap();
        assert!((g.outer_radius(0).unwrap() - 2.0).abs() < 1e-15);
        assert!((g.perimeter - 4.0 * PI).abs() < 1e-14);
        let g1 = solve(0, 1.0).unwrap();
        assert!((g1.perimeter - 2.0 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(solve(0, 0.0).is_err());
        assert!(solve(0, -1.0).is_err());

    }
}
