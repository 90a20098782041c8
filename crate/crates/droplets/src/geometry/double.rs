//! Standard double bubble from prescribed lobe areas.
//!
//! All three arcs pass through the two junctions, so their centers share the
//! chord's perpendicular bisector and the 120-degree conditions collapse to
//! closed form. With `t` the half-angle of the larger lobe's outer arc, the
//! smaller lobe's half-angle is `4pi/3 - t` and the wall's is `t - 2pi/3`;
//! the chord then scales to match the areas. Only the area ratio needs a
//! one-dimensional root find in `t`.

use super::{march::unit_segment, wall_slot, Arc, BubbleKind, ClusterGeometry};
use crate::error::{Error, Result};
use crate::vec2::{v2, V2};
use std::f64::consts::PI;

/// Half-angles of the three arcs for family parameter `t`.
fn half_angles(t: f64) -> (f64, f64, f64) {
    (t, 4.0 * PI / 3.0 - t, t - 2.0 * PI / 3.0)
}

/// Unit-chord lobe areas (larger, smaller).
fn unit_areas(t: f64) -> (f64, f64) {
    let (t, u, v) = half_angles(t);
    let sv = unit_segment(v);
    (unit_segment(t) - sv, unit_segment(u) + sv)
}

/// Solve `area_small / area_large = target` for the family parameter.
fn solve_family(target: f64) -> Result<f64> {
    debug_assert!(target > 0.0 && target <= 1.0);
    if target == 1.0 {
        return Ok(2.0 * PI / 3.0);
    }
    let mut lo = 2.0 * PI / 3.0;
    let mut hi = PI - 1e-9;
    let ratio = |t: f64| {
        let (al, asm) = unit_areas(t);
        asm / al
    };
    if ratio(hi) > target {
        return Err(Error::numeric(
            "double bubble family exhausted (mass ratio too extreme)",
            ratio(hi) - target,
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Arc length at unit half-chord for half-angle `w`: `2 w / sin w`.
fn unit_arc_length(w: f64) -> f64 {
    if w == 0.0 {
        2.0
    } else {
        2.0 * w / w.sin()
    }
}

pub fn solve(i: usize, j: usize, mi: f64, mj: f64) -> Result<ClusterGeometry> {
    if i >= j || j > 2 {
        return Err(Error::domain(format!("invalid double-bubble type pair ({i}, {j})")));
    }
    if !(mi > 0.0) || !(mj > 0.0) || !mi.is_finite() || !mj.is_finite() {
        return Err(Error::domain(format!(
            "double bubble masses must be positive, got ({mi}, {mj})"
        )));
    }
    let (big, small, m_big, m_small) = if mi >= mj { (i, j, mi, mj) } else { (j, i, mj, mi) };
    let t = solve_family(m_small / m_big)?;
    let (tb, ts, tv) = half_angles(t);
    let (a_big, _) = unit_areas(t);
    let ell = (m_big / a_big).sqrt();

    // Axis frame: junctions at (0, +-ell), larger lobe to the left, wall
    // bulging into it. Centers sit on the x axis.
    let r_big = ell / tb.sin();
    let r_small = ell / ts.sin();
    let p1 = v2(0.0, ell);
    let p2 = v2(0.0, -ell);
    let o_big = v2(r_big * tb.cos(), 0.0);
    let o_small = v2(-r_small * ts.cos(), 0.0);
    let straight = tv < 1e-12;
    let o_wall = if straight {
        None
    } else {
        Some(v2((ell / tv.sin()) * tv.cos(), 0.0))
    };

    // Canonical frame: first junction at the origin, wall tangent along +y.
    let t_int = v2(-tv.sin(), -tv.cos());
    let beta = t_int.ccw_angle_to(v2(0.0, 1.0));
    let tf = |q: V2| (q - p1).rotate(beta);

    let kb = 1.0 / r_big;
    let ks = 1.0 / r_small;
    let mut arcs: [Option<Arc>; 6] = [None; 6];
    arcs[big] = Some(Arc {
        curvature: kb,
        angle: 2.0 * tb,
        chord: 2.0 * ell,
        length: ell * unit_arc_length(tb),
        center: Some(tf(o_big)),
        endpoints: Some((tf(p1), tf(p2))),
    });
    arcs[small] = Some(Arc {
        curvature: ks,
        angle: 2.0 * ts,
        chord: 2.0 * ell,
        length: ell * unit_arc_length(ts),
        center: Some(tf(o_small)),
        endpoints: Some((tf(p1), tf(p2))),
    });
    // Signed wall curvature in type-slot order (kappa_j - kappa_i).
    let (kappa_i, kappa_j) = if big == i { (kb, ks) } else { (ks, kb) };
    arcs[wall_slot(i, j)] = Some(Arc {
        curvature: kappa_j - kappa_i,
        angle: 2.0 * tv,
        chord: 2.0 * ell,
        length: ell * unit_arc_length(tv),
        center: o_wall.map(tf),
        endpoints: Some((tf(p1), tf(p2))),
    });

    let mut masses = [0.0; 3];
    masses[i] = mi;
    masses[j] = mj;
    let perimeter = ell * (unit_arc_length(tb) + unit_arc_length(ts) + unit_arc_length(tv));

    // Counter-clockwise boundary walks (lobe on the left). The wall bulges
    // into the larger lobe, whose walk therefore turns right along it.
    let rot = |q: V2| q.rotate(beta);
    let kappa_v = tv.sin() / ell;
    let wall_len = ell * unit_arc_length(tv);
    let mut lobes: [Option<Vec<super::BoundaryLeg>>; 3] = Default::default();
    lobes[big] = Some(vec![
        super::BoundaryLeg {
            start: tf(p1),
            tangent: rot(v2(-tb.sin(), -tb.cos())),
            curvature: kb,
            length: r_big * 2.0 * tb,
        },
        super::BoundaryLeg {
            start: tf(p2),
            tangent: rot(v2(-tv.sin(), tv.cos())),
            curvature: -kappa_v,
            length: wall_len,
        },
    ]);
    lobes[small] = Some(vec![
        super::BoundaryLeg {
            start: tf(p2),
            tangent: rot(v2(ts.sin(), ts.cos())),
            curvature: ks,
            length: r_small * 2.0 * ts,
        },
        super::BoundaryLeg {
            start: tf(p1),
            tangent: rot(v2(-tv.sin(), -tv.cos())),
            curvature: kappa_v,
            length: wall_len,
        },
    ]);

    Ok(ClusterGeometry {
        kind: BubbleKind::Double(i, j),
        masses,
        arcs,
        junctions: vec![tf(p1), tf(p2)],
        junction_angles: None,
        perimeter,
        lobes,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Equal lobes: straight wall, two 240-degree arcs; closed form checked
    /// against the solver.
    #[test]
    fn symmetric_closed_form() {
        let m = 0.5 * (4.0 * PI / 3.0 + 3f64.sqrt() / 2.0); // r = 1 normalization
        let g = solve(0, 1, m, m).unwrap();
        assert!((g.perimeter - (8.0 * PI / 3.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!((g.arcs[0].unwrap().angle - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((g.outer_radius(0).unwrap() - 1.0).abs() < 1e-12);
        let wall = g.arcs[wall_slot(0, 1)].unwrap();
        assert!(wall.curvature.abs() < 1e-12);
        assert!(wall.center.is_none());
        for m_test in [0.3, 1.0, 7.5] {
            let g = solve(0, 1, m_test, m_test).unwrap();
            assert!(
                (g.perimeter - super::super::symmetric::double_perimeter(m_test)).abs()
                    < 1e-11 * g.perimeter
            );
        }
    }

    #[test]
    fn areas_round_trip() {
        for &(a, b) in &[(1.0, 0.4), (3.0, 2.9), (10.0, 0.01), (1.0, 1e-8)] {
            let g = solve(0, 1, a, b).unwrap();
            let areas = g.segment_area_masses();
            assert!((areas[0] - a).abs() < 1e-11 * a, "a={a} b={b} got {areas:?}");
            assert!((areas[1] - b).abs() < 1e-10 * b, "a={a} b={b} got {areas:?}");
        }
    }

    #[test]
    fn exceeds_single_of_total_mass() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 0.3), (5.0, 4.0)] {
            let g = solve(0, 1, a, b).unwrap();
            assert!(g.perimeter > 2.0 * (PI * (a + b)).sqrt());
        }
    }

    #[test]
    fn single_bubble_limit() {
        let g = solve(0, 1, 1.0, 1e-8).unwrap();
        assert!((g.perimeter - 2.0 * PI.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn family_ratio_is_monotone() {
        let mut prev = f64::INFINITY;
        for k in 0..400 {
            let t = 2.0 * PI / 3.0 + (PI / 3.0 - 1e-6) * (k as f64) / 400.0;
            let (al, asm) = unit_areas(t);
            let rho = asm / al;
            assert!(rho < prev + 1e-14, "ratio not decreasing at t={t}");
            prev = rho;
        }
    }
}
