//! Triple bubble from prescribed lobe areas.
//!
//! The cluster is built from the central junction outward: the three walls
//! leave the origin at 120 degrees with curvatures given by pressure
//! differences, and the outer arcs hang off the wall endpoints at 120
//! degrees with curvatures equal to the lobe pressures. Each outer arc is
//! constructed independently from both of its junctions; the solver drives
//! the two center estimates together (closure) while matching the three
//! areas. Unknowns are log-pressures and log wall lengths, so positivity is
//! built in and straight walls are regular points.
//!
//! Masses are normalized to `m1 = 1` (the perimeter scales as `sqrt(m)`),
//! sorted descending, and continued from the equal-mass closed form along a
//! geometric path in mass space.

use super::{green_leg, march, wall_slot, Arc, BubbleKind, ClusterGeometry};
use crate::error::{Error, Result};
use crate::linalg::{lm_step, Mat};
use crate::vec2::V2;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

const THIRD_TURN: f64 = 2.0 * PI / 3.0;
/// Residual tolerance (closure is absolute at unit scale, areas relative).
const RES_TOL: f64 = 1e-12;

/// Everything the residual evaluation produces, kept for assembly.
struct Built {
    p: [f64; 3],
    wall_len: [f64; 3],
    /// Wall end junctions in canonical order [j01, j12, j02].
    junctions: [V2; 3],
    /// Wall end tangents (travel direction arriving at the junction).
    t_end: [V2; 3],
    /// Signed wall curvatures in march orientation [k01, k12, k02].
    wall_k: [f64; 3],
    /// Outer-arc center estimates (from each adjacent junction).
    centers: [(V2, V2); 3],
    /// Outer-arc sweep angles.
    sweep: [f64; 3],
    /// Outer-arc endpoints in traversal order.
    arc_ends: [(V2, V2); 3],
    areas: [f64; 3],
    perimeter: f64,
}

/// Tangent ray directions of the three walls at the central junction.
const WALL_DIRS: [f64; 3] = [
    FRAC_PI_2,              // wall between lobes 0,1
    FRAC_PI_2 + THIRD_TURN, // wall between lobes 1,2
    FRAC_PI_2 + 2.0 * THIRD_TURN, // wall between lobes 0,2
];

fn build(x: &[f64; 6]) -> Built {
    let p = [x[0].exp(), x[1].exp(), x[2].exp()];
    let l = [x[3].exp(), x[4].exp(), x[5].exp()];
    // Walls bulge into the lower-pressure lobe; with lobes 0,1,2 placed
    // counter-clockwise the march orientations work out to these signs.
    let k = [p[1] - p[0], p[2] - p[1], -(p[2] - p[0])];

    let (j01, t01) = march(V2::ZERO, V2::dir(WALL_DIRS[0]), k[0], l[0]);
    let (j12, t12) = march(V2::ZERO, V2::dir(WALL_DIRS[1]), k[1], l[1]);
    let (j02, t02) = march(V2::ZERO, V2::dir(WALL_DIRS[2]), k[2], l[2]);

    // Outer-arc tangent rays at each junction (pointing along the arc away
    // from the junction). The +120 ray runs its arc clockwise, the -120 ray
    // counter-clockwise.
    let r0_a = (-t01).rotate(THIRD_TURN);
    let r1_a = (-t01).rotate(-THIRD_TURN);
    let r1_b = (-t12).rotate(THIRD_TURN);
    let r2_b = (-t12).rotate(-THIRD_TURN);
    let r2_c = (-t02).rotate(THIRD_TURN);
    let r0_c = (-t02).rotate(-THIRD_TURN);

    let centers = [
        (j01 - r0_a.perp() * (1.0 / p[0]), j02 + r0_c.perp() * (1.0 / p[0])),
        (j01 + r1_a.perp() * (1.0 / p[1]), j12 - r1_b.perp() * (1.0 / p[1])),
        (j12 + r2_b.perp() * (1.0 / p[2]), j02 - r2_c.perp() * (1.0 / p[2])),
    ];

    // Counter-clockwise sweeps: lobe 0 arc runs j02 -> j01, lobe 1 arc
    // j01 -> j12, lobe 2 arc j12 -> j02.
    let sweep = [
        r0_c.ccw_angle_to(-r0_a),
        r1_a.ccw_angle_to(-r1_b),
        r2_b.ccw_angle_to(-r2_c),
    ];
    let arc_ends = [(j02, j01), (j01, j12), (j12, j02)];

    let areas = [
        green_leg(V2::ZERO, j02, k[2], l[2])
            + green_leg(j02, j01, p[0], sweep[0] / p[0])
            + green_leg(j01, V2::ZERO, -k[0], l[0]),
        green_leg(V2::ZERO, j01, k[0], l[0])
            + green_leg(j01, j12, p[1], sweep[1] / p[1])
            + green_leg(j12, V2::ZERO, -k[1], l[1]),
        green_leg(V2::ZERO, j12, k[1], l[1])
            + green_leg(j12, j02, p[2], sweep[2] / p[2])
            + green_leg(j02, V2::ZERO, -k[2], l[2]),
    ];
    let perimeter =
        l[0] + l[1] + l[2] + sweep[0] / p[0] + sweep[1] / p[1] + sweep[2] / p[2];

    Built {
        p,
        wall_len: l,
        junctions: [j01, j12, j02],
        t_end: [t01, t12, t02],
        wall_k: k,
        centers,
        sweep,
        arc_ends,
        areas,
        perimeter,
    }
}

fn residual(x: &[f64; 6], m: &[f64; 3], out: &mut [f64; 9]) -> Built {
    let b = build(x);
    for i in 0..3 {
        let d = b.centers[i].0 - b.centers[i].1;
        out[2 * i] = d.x;
        out[2 * i + 1] = d.y;
        out[6 + i] = (b.areas[i] - m[i]) / m[i];
    }
    b
}

fn norm_inf(f: &[f64; 9]) -> f64 {
    f.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn norm_sq(f: &[f64; 9]) -> f64 {
    f.iter().map(|v| v * v).sum()
}

/// Levenberg-Marquardt on the 9 residuals over the 6 log unknowns.
fn lm_solve(mut x: [f64; 6], m: &[f64; 3]) -> std::result::Result<[f64; 6], f64> {
    let mut f = [0.0; 9];
    residual(&x, m, &mut f);
    let mut cost = norm_sq(&f);
    let mut best_res = norm_inf(&f);
    let mut mu = 1e-8;
    for _ in 0..60 {
        if norm_inf(&f) < RES_TOL {
            return Ok(x);
        }
        // Forward-difference Jacobian in log space.
        let mut jac = Mat::zeros(9, 6);
        let h = 1e-7;
        for col in 0..6 {
            let mut xp = x;
            xp[col] += h;
            let mut fp = [0.0; 9];
            residual(&xp, m, &mut fp);
            for row in 0..9 {
                jac.set(row, col, (fp[row] - f[row]) / h);
            }
        }
        let mut accepted = false;
        for _ in 0..25 {
            let Some(dx) = lm_step(&jac, &f, mu) else {
                return Err(best_res);
            };
            let mut xn = x;
            for i in 0..6 {
                xn[i] += dx[i].clamp(-2.0, 2.0);
            }
            let mut fn_ = [0.0; 9];
            residual(&xn, m, &mut fn_);
            let cn = norm_sq(&fn_);
            if cn.is_finite() && cn < cost {
                x = xn;
                f = fn_;
                cost = cn;
                best_res = best_res.min(norm_inf(&f));
                mu = (mu / 4.0).max(1e-14);
                accepted = true;
                break;
            }
            mu *= 8.0;
            if mu > 1e14 {
                return Err(best_res);
            }
        }
        if !accepted {
            return Err(best_res);
        }
    }
    if norm_inf(&f) < RES_TOL {
        Ok(x)
    } else {
        Err(norm_inf(&f))
    }
}

/// Equal-mass closed form used as the continuation start.
fn symmetric_start() -> [f64; 6] {
    let r = super::symmetric::radius(1.0);
    let p = (1.0 / r).ln();
    let l = super::symmetric::wall_length(1.0).ln();
    [p, p, p, l, l, l]
}

/// Warm-start cache for repeated solves at nearby mass ratios.
pub struct TripleCache {
    last: Option<(f64, f64, [f64; 6])>,
    memo: HashMap<(u64, u64), [f64; 6]>,
}

impl TripleCache {
    pub fn new() -> TripleCache {
        TripleCache {
            last: None,
            memo: HashMap::new(),
        }
    }
}

impl Default for TripleCache {
    fn default() -> Self {
        TripleCache::new()
    }
}

/// Solve at normalized masses `(1, a, b)`, `1 >= a >= b > 0`.
fn solve_normalized(cache: &mut TripleCache, a: f64, b: f64) -> Result<[f64; 6]> {
    let key = (a.to_bits(), b.to_bits());
    if let Some(x) = cache.memo.get(&key) {
        return Ok(*x);
    }
    let masses = [1.0, a, b];
    if let Some((pa, pb, px)) = cache.last {
        let d = (a.ln() - pa.ln()).powi(2) + (b.ln() - pb.ln()).powi(2);
        if d < 0.25 {
            if let Ok(x) = lm_solve(px, &masses) {
                cache.last = Some((a, b, x));
                if cache.memo.len() > 65_536 {
                    cache.memo.clear();
                }
                cache.memo.insert(key, x);
                return Ok(x);
            }
        }
    }
    // Geometric continuation from the equal-mass bubble.
    let (la, lb) = (a.ln(), b.ln());
    let mut x = symmetric_start();
    let mut tau = 0.0f64;
    let mut step = 1.0f64;
    let mut best_res = f64::INFINITY;
    while tau < 1.0 {
        let tn = (tau + step).min(1.0);
        let target = [1.0, (tn * la).exp(), (tn * lb).exp()];
        match lm_solve(x, &target) {
            Ok(xs) => {
                x = xs;
                tau = tn;
                step = (step * 1.8).min(1.0);
                cache.last = Some((target[1], target[2], x));
            }
            Err(r) => {
                best_res = best_res.min(r);
                step *= 0.5;
                if step < 1e-4 {
                    return Err(Error::numeric(
                        format!("triple bubble continuation stalled at ratios ({a:.3e}, {b:.3e})"),
                        best_res,
                    ));
                }
            }
        }
    }
    if cache.memo.len() > 65_536 {
        cache.memo.clear();
    }
    cache.memo.insert(key, x);
    Ok(x)
}

pub fn solve(cache: &mut TripleCache, masses: [f64; 3]) -> Result<ClusterGeometry> {
    // Canonical descending order; ties keep index order.
    let mut ord = [0usize, 1, 2];
    ord.sort_by(|&i, &j| masses[j].partial_cmp(&masses[i]).unwrap().then(i.cmp(&j)));
    let mc = [masses[ord[0]], masses[ord[1]], masses[ord[2]]];
    let scale = mc[0];
    let x = solve_normalized(cache, mc[1] / scale, mc[2] / scale)?;
    let built = build(&x);
    Ok(assemble(&built, ord, masses, scale))
}

/// Scale the normalized construction, relabel lobes back to input order and
/// rotate so the wall between input lobes 1 and 2 leaves the origin along +y.
fn assemble(b: &Built, ord: [usize; 3], masses: [f64; 3], scale: f64) -> ClusterGeometry {
    let s = scale.sqrt();
    // pos[i] = canonical index of input lobe i.
    let mut pos = [0usize; 3];
    for (c, &inp) in ord.iter().enumerate() {
        pos[inp] = c;
    }
    // Canonical wall index for a canonical lobe pair.
    let canon_wall = |a: usize, b_: usize| match (a.min(b_), a.max(b_)) {
        (0, 1) => 0,
        (1, 2) => 1,
        (0, 2) => 2,
        _ => unreachable!(),
    };
    let frame_wall = canon_wall(pos[0], pos[1]);
    let beta = FRAC_PI_2 - WALL_DIRS[frame_wall];
    let tp = |q: V2| (q * s).rotate(beta);

    let outer_kappa = |i: usize| b.p[pos[i]] / s;
    let mut arcs: [Option<Arc>; 6] = [None; 6];
    for i in 0..3 {
        let c = pos[i];
        let (a_end, b_end) = b.arc_ends[c];
        let kappa = outer_kappa(i);
        let center = 0.5 * (b.centers[c].0 + b.centers[c].1);
        arcs[i] = Some(Arc {
            curvature: kappa,
            angle: b.sweep[c],
            chord: (a_end - b_end).norm() * s,
            length: b.sweep[c] / kappa,
            center: Some(tp(center)),
            endpoints: Some((tp(a_end), tp(b_end))),
        });
    }
    let p_scale = b.p[2].max(b.p[0]);
    let mut wall_junction = [V2::ZERO; 3]; // per input pair (1,2), (1,3), (2,3)
    for (pair_idx, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
        let w = canon_wall(pos[*i], pos[*j]);
        let junction = b.junctions[w];
        wall_junction[pair_idx] = tp(junction);
        let k_march = b.wall_k[w];
        let center = if k_march.abs() > 1e-12 * p_scale {
            Some(tp(V2::dir(WALL_DIRS[w]).perp() * (1.0 / k_march)))
        } else {
            None
        };
        arcs[wall_slot(*i, *j)] = Some(Arc {
            curvature: outer_kappa(*j) - outer_kappa(*i),
            angle: (k_march * b.wall_len[w]).abs(),
            chord: junction.norm() * s,
            length: b.wall_len[w] * s,
            center,
            endpoints: Some((V2::ZERO, tp(junction))),
        });
    }

    // Wedge of each lobe at the central junction, measured counter-clockwise
    // from the outer arc's start chord to its end chord; exceeds pi when the
    // lobe wraps around the junction, so sin(s) signs the chord triangle.
    let wedge = |i: usize| {
        let (a_end, b_end) = b.arc_ends[pos[i]];
        a_end.ccw_angle_to(b_end)
    };
    let junction_angles = [wedge(0), wedge(1), wedge(2)];

    // Boundary walks per canonical lobe: wall out, outer arc, wall back.
    let td = |d: V2| d.rotate(beta);
    let make_leg = |start: V2, tangent: V2, k: f64, len: f64| super::BoundaryLeg {
        start: tp(start),
        tangent: td(tangent),
        curvature: k / s,
        length: len * s,
    };
    let mut lobes: [Option<Vec<super::BoundaryLeg>>; 3] = Default::default();
    for i in 0..3 {
        let c = pos[i];
        // Canonical lobe c walks: wall A from the center, its outer arc,
        // wall B back to the center (see the area legs in `build`).
        let (wall_out, wall_back) = match c {
            0 => (2, 0), // w02 out, w01 back
            1 => (0, 1), // w01 out, w12 back
            _ => (1, 2), // w12 out, w02 back
        };
        let (arc_start, _) = b.arc_ends[c];
        let arc_tangent = match c {
            0 => (-b.t_end[2]).rotate(-THIRD_TURN),
            1 => (-b.t_end[0]).rotate(-THIRD_TURN),
            _ => (-b.t_end[1]).rotate(-THIRD_TURN),
        };
        let legs = vec![
            make_leg(
                V2::ZERO,
                V2::dir(WALL_DIRS[wall_out]),
                b.wall_k[wall_out],
                b.wall_len[wall_out],
            ),
            make_leg(arc_start, arc_tangent, b.p[c], b.sweep[c] / b.p[c]),
            make_leg(
                b.junctions[wall_back],
                -b.t_end[wall_back],
                -b.wall_k[wall_back],
                b.wall_len[wall_back],
            ),
        ];
        lobes[i] = Some(legs);
    }

    ClusterGeometry {
        kind: BubbleKind::Triple,
        masses,
        arcs,
        junctions: vec![V2::ZERO, wall_junction[0], wall_junction[1], wall_junction[2]],
        junction_angles: Some(junction_angles),
        perimeter: b.perimeter * s,
        lobes,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_masses_match_closed_form() {
        let mut cache = TripleCache::new();
        for m in [0.2, 1.0, 5.0] {
            let g = solve(&mut cache, [m, m, m]).unwrap();
            let expect = super::super::symmetric::triple_perimeter(m);
            assert!(
                (g.perimeter - expect).abs() < 1e-12 * expect,
                "m={m}: {} vs {}",
                g.perimeter,
                expect
            );
            // Straight internal walls.
            for slot in 3..6 {
                assert!(g.arcs[slot].unwrap().curvature.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymmetric_solve_reproduces_areas() {
        let mut cache = TripleCache::new();
        for m in [[2.0, 1.0, 0.5], [1.0, 0.9, 0.2], [10.0, 0.1, 0.05]] {
            let g = solve(&mut cache, m).unwrap();
            let areas = g.segment_area_masses();
            for i in 0..3 {
                assert!(
                    (areas[i] - m[i]).abs() < 1e-10 * m[i],
                    "m={m:?} lobe {i}: {} vs {}",
                    areas[i],
                    m[i]
                );
            }
        }
    }

    #[test]
    fn perimeter_is_permutation_invariant() {
        let mut cache = TripleCache::new();
        let base = solve(&mut cache, [2.0, 1.0, 0.5]).unwrap().perimeter;
        for m in [[1.0, 2.0, 0.5], [0.5, 1.0, 2.0], [2.0, 0.5, 1.0]] {
            let p = solve(&mut cache, m).unwrap().perimeter;
            assert!((p - base).abs() < 1e-11 * base);
        }
    }

    #[test]
    fn degeneration_to_double() {
        let mut cache = TripleCache::new();
        let pd = super::super::double_perimeter(1.0, 1.0).unwrap();
        let mut prev_gap = f64::INFINITY;
        for k in 2..=8 {
            let eps = 10f64.powi(-k);
            let g = solve(&mut cache, [1.0, 1.0, eps]).unwrap();
            let gap = g.perimeter - pd;
            assert!(gap > -1e-12, "perimeter should exceed the double limit");
            assert!(gap < prev_gap + 1e-12, "convergence should be monotone");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3);
    }
}
