//! Quadrature over arc-bounded lobes and pairwise kernel integrals.
//!
//! A lobe is fanned from the centroid of its leg endpoints into signed
//! triangles plus circular segments, each mapped to a tensor Gauss rule.
//! The logarithmic part of the Green's function is integrated by reducing
//! the double area integral to a double boundary integral: applying the
//! divergence theorem twice to the biharmonic antiderivative of `ln r`
//! leaves the kernel
//!
//! `H = -(ln r / 8 - 3/32) (d.n_x)(d.n_y) - (r^2 ln r / 16 - 5 r^2/64)
//! (n_x . n_y)`,
//!
//! which vanishes continuously as `r -> 0`, so touching or shared
//! boundaries need no special treatment.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryLeg, ClusterGeometry};
use crate::vec2::{v2, V2};

/// Nodes of the Gauss-Legendre rule on [0, 1].
pub(crate) fn gauss_unit(n: usize) -> Vec<(f64, f64)> {
    // Newton iteration on Legendre polynomials, mapped from [-1, 1].
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Split legs whose sweep exceeds ~120 degrees so the segment map below
/// stays well conditioned.
fn split_legs(legs: &[BoundaryLeg]) -> Vec<BoundaryLeg> {
    let mut out = Vec::new();
    for leg in legs {
        let sweep = (leg.curvature * leg.length).abs();
        let pieces = (sweep / (2.0 * std::f64::consts::PI / 3.0)).ceil().max(1.0) as usize;
        let seg_len = leg.length / pieces as f64;
        let mut start = leg.start;
        let mut tangent = leg.tangent;
        for _ in 0..pieces {
            out.push(BoundaryLeg {
                start,
                tangent,
                curvature: leg.curvature,
                length: seg_len,
            });
            let next = crate::geometry::BoundaryLeg {
                start,
                tangent,
                curvature: leg.curvature,
                length: seg_len,
            }
            .at(1.0);
            start = next.0;
            tangent = next.1;
        }
    }
    out
}

/// Signed tensor-Gauss nodes integrating over one lobe of a cluster.
///
/// Returns `(point, weight)` pairs with weights summing to the lobe area.
pub fn lobe_nodes(geo: &ClusterGeometry, lobe: usize, order: usize) -> Result<Vec<(V2, f64)>> {
    let Some(legs) = &geo.lobes[lobe] else {
        return Err(Error::domain(format!("lobe {} absent", lobe + 1)));
    };
    let legs = split_legs(legs);
    // Fan point: average of leg start points.
    let mut p0 = V2::ZERO;
    for leg in &legs {
        p0 = p0 + leg.start;
    }
    let p0 = p0 * (1.0 / legs.len() as f64);
    let g1 = gauss_unit(order);
    let mut nodes = Vec::new();
    for leg in &legs {
        let a = leg.start;
        let b = leg.end();
        // Signed triangle (p0, a, b) via the Duffy map.
        let det = (a - p0).cross(b - a);
        if det.abs() > 1e-300 {
            for &(u, wu) in &g1 {
                for &(t, wt) in &g1 {
                    let p = p0 + u * ((a - p0) + t * (b - a));
                    nodes.push((p, wu * wt * u * det));
                }
            }
        }
        // Circular segment between chord ab and the arc, signed by turning.
        let phi = leg.curvature * leg.length;
        if phi.abs() > 1e-12 {
            let r = 1.0 / leg.curvature.abs();
            let center = leg.start + leg.tangent.perp() * (1.0 / leg.curvature);
            let mid = (a + b) * 0.5;
            let half = phi.abs() / 2.0;
            let d = r * half.cos();
            let psi_mid = (mid - center).angle();
            let sign = phi.signum();
            for &(u, wu) in &g1 {
                let beta = phi.abs() * (u - 0.5);
                let rho_chord = d / beta.cos();
                for &(t, wt) in &g1 {
                    let rho = rho_chord + t * (r - rho_chord);
                    let p = center + rho * V2::dir(psi_mid + beta);
                    let jac = rho * (r - rho_chord) * phi.abs();
                    nodes.push((p, sign * wu * wt * jac));
                }
            }
        }
    }
    Ok(nodes)
}

/// The reduced boundary kernel of `int int ln|x-y|`.
fn h_kernel(x: V2, nx: V2, y: V2, ny: V2) -> f64 {
    let d = y - x;
    let r2 = d.norm2();
    if r2 < 1e-280 {
        return 0.0;
    }
    let ln_r = 0.5 * r2.ln();
    -(ln_r / 8.0 - 3.0 / 32.0) * d.dot(nx) * d.dot(ny)
        - (r2 * ln_r / 16.0 - 5.0 * r2 / 64.0) * (nx.dot(ny))
}

/// Boundary samples of a lobe: point, outward normal, arclength weight.
fn boundary_samples(
    legs: &[BoundaryLeg],
    offset: V2,
    scale: f64,
    order: usize,
) -> Vec<(V2, V2, f64)> {
    let g1 = gauss_unit(order);
    let mut out = Vec::new();
    for leg in legs {
        for &(t, w) in &g1 {
            let (p, tangent) = leg.at(t);
            // Counter-clockwise walk: outward normal is the right normal.
            out.push((offset + p * scale, -tangent.perp(), w * leg.length * scale));
        }
    }
    out
}

/// `int_{A} int_{B} ln|x - y| dx dy` where `A`, `B` are (possibly identical
/// or touching) lobes, each optionally translated and scaled.
pub fn log_pair_integral(
    geo_a: &ClusterGeometry,
    lobe_a: usize,
    off_a: V2,
    geo_b: &ClusterGeometry,
    lobe_b: usize,
    off_b: V2,
    scale: f64,
    order: usize,
) -> Result<f64> {
    let legs_a = split_legs(
        geo_a.lobes[lobe_a]
            .as_ref()
            .ok_or_else(|| Error::domain("lobe absent"))?,
    );
    let legs_b = split_legs(
        geo_b.lobes[lobe_b]
            .as_ref()
            .ok_or_else(|| Error::domain("lobe absent"))?,
    );
    let sa = boundary_samples(&legs_a, off_a, scale, order);
    let sb = boundary_samples(&legs_b, off_b, scale, order);
    let mut sum = 0.0;
    for &(x, nx, wx) in &sa {
        let mut inner = 0.0;
        for &(y, ny, wy) in &sb {
            inner += h_kernel(x, nx, y, ny) * wy;
        }
        sum += inner * wx;
    }
    Ok(sum)
}

/// `int_A int_B G(x - y)` over two placed, scaled lobes. The placed support
/// of a bubble at `pos` is `pos + eta * (q - anchor)` over its geometry
/// points `q`. While the pair fits in the local chart (`|x - y| < 1/2`) the
/// Green's function splits into the boundary-reduced log part plus the
/// smooth regular part on area nodes; separated pairs integrate `G`
/// directly.
#[allow(clippy::too_many_arguments)]
pub fn pair_g_integral(
    greens: &super::GreensEvaluator,
    geo_a: &ClusterGeometry,
    lobe_a: usize,
    pos_a: V2,
    geo_b: &ClusterGeometry,
    lobe_b: usize,
    pos_b: V2,
    eta: f64,
    order: usize,
) -> Result<f64> {
    let delta = super::torus_delta(pos_a, pos_b);
    let reach = eta * (geo_a.enclosing_radius() + geo_b.enclosing_radius());
    let off_a = delta - eta * geo_a.anchor();
    let off_b = -eta * geo_b.anchor();
    let nodes_a = lobe_nodes(geo_a, lobe_a, order)?;
    let nodes_b = lobe_nodes(geo_b, lobe_b, order)?;
    let scale4 = eta * eta * eta * eta;
    if delta.norm() + reach < 0.45 {
        let log_part = log_pair_integral(
            geo_a,
            lobe_a,
            off_a,
            geo_b,
            lobe_b,
            off_b,
            eta,
            order.max(12),
        )?;
        let mut r_part = 0.0;
        for &(ua, wa) in &nodes_a {
            for &(ub, wb) in &nodes_b {
                let arg = off_a + ua * eta - off_b - ub * eta;
                r_part += wa * wb * greens.regular_part(arg)?;
            }
        }
        Ok(-log_part / (2.0 * std::f64::consts::PI) + r_part * scale4)
    } else {
        let mut sum = 0.0;
        for &(ua, wa) in &nodes_a {
            for &(ub, wb) in &nodes_b {
                let arg = off_a + ua * eta - off_b - ub * eta;
                sum += wa * wb * greens.eval(arg)?;
            }
        }
        Ok(sum * scale4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{solve_cluster, solve_single, MassTriple};
    use std::f64::consts::PI;

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in [4, 8, 12] {
            let g = gauss_unit(n);
            let sum: f64 = g.iter().map(|&(_, w)| w).sum();
            assert!((sum - 1.0).abs() < 1e-14);
            let x3: f64 = g.iter().map(|&(x, w)| w * x * x * x).collect::<Vec<_>>().iter().sum();
            assert!((x3 - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn lobe_nodes_reproduce_areas() {
        let single = solve_single(2.0).unwrap();
        let nodes = lobe_nodes(&single, 0, 8).unwrap();
        let area: f64 = nodes.iter().map(|&(_, w)| w).sum();
        assert!((area - 2.0).abs() < 1e-10 * 2.0);

        let triple = solve_cluster(&MassTriple::new([2.0, 1.0, 0.5]).unwrap()).unwrap();
        for (i, &m) in [2.0, 1.0, 0.5].iter().enumerate() {
            let nodes = lobe_nodes(&triple, i, 10).unwrap();
            let area: f64 = nodes.iter().map(|&(_, w)| w).sum();
            assert!((area - m).abs() < 1e-9 * m, "lobe {i}: {area} vs {m}");
        }
    }

    #[test]
    fn disk_log_self_integral() {
        // int int_{D_R x D_R} ln|x-y| = pi^2 R^4 (ln R - 1/4).
        let m = PI * 0.49; // R = 0.7
        let disk = solve_single(m).unwrap();
        let r: f64 = 0.7;
        let expect = PI * PI * r.powi(4) * (r.ln() - 0.25);
        let got = log_pair_integral(&disk, 0, V2::ZERO, &disk, 0, V2::ZERO, 1.0, 24).unwrap();
        assert!(
            (got - expect).abs() < 1e-8 * expect.abs(),
            "{got} vs {expect}"
        );
    }

    #[test]
    fn separated_disks_match_node_quadrature() {
        let m = PI * 0.01; // R = 0.1
        let disk = solve_single(m).unwrap();
        let off = v2(0.35, 0.0);
        let boundary =
            log_pair_integral(&disk, 0, off, &disk, 0, V2::ZERO, 1.0, 20).unwrap();
        let na = lobe_nodes(&disk, 0, 12).unwrap();
        let mut direct = 0.0;
        for &(a, wa) in &na {
            for &(b, wb) in &na {
                direct += wa * wb * (off + a - b).norm().ln();
            }
        }
        assert!(
            (boundary - direct).abs() < 1e-9,
            "{boundary} vs {direct}"
        );
    }
}
