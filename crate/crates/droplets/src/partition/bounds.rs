//! Analytic mass bounds for minimizer lobes.
//!
//! The upper bound `m+ = 8 pi / Gamma_ii^{2/3}` comes from comparing a bubble
//! against splitting half of its largest lobe into a separate single bubble.
//! The lower bound combines the shared Lagrange multiplier with the
//! isoperimetric inequality; its constants are not sharp, so it is reported
//! as a diagnostic certificate and never used to discard candidate optima.

use crate::energy::GammaMatrix;
use crate::error::{Error, Result};
use crate::geometry::{self, MassTriple};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `m_i^+ = 8 pi / Gamma_ii^{2/3}`; infinite when the self-interaction
/// vanishes.
pub fn mass_upper_bound(gamma: &GammaMatrix) -> [f64; 3] {
    let mut out = [f64::INFINITY; 3];
    for i in 0..3 {
        let g = gamma.at(i, i);
        if g > 0.0 {
            out[i] = 8.0 * PI / g.powf(2.0 / 3.0);
        }
    }
    out
}

/// Minimal-mass certificate:
/// `m_i^- = c1 * min{ [ (1/pi) sum_j Gamma_ij M_j ]^-2, [ C2 M_i / (4 c2 E) ]^2 }`.
///
/// Types with `M_i = 0` report 0.
pub fn mass_lower_bound(
    m_totals: [f64; 3],
    gamma: &GammaMatrix,
    energy_upper: f64,
    c1: f64,
    c2: f64,
    big_c2: f64,
) -> Result<[f64; 3]> {
    if !(energy_upper > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(big_c2 > 0.0) {
        return Err(Error::domain(
            "mass_lower_bound requires positive constants and energy upper bound",
        ));
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        if m_totals[i] <= 0.0 {
            continue;
        }
        let row = gamma.row_dot(i, m_totals) / PI;
        let branch1 = if row > 0.0 { row.powi(-2) } else { f64::INFINITY };
        let branch2 = (big_c2 * m_totals[i] / (4.0 * c2 * energy_upper)).powi(2);
        out[i] = c1 * branch1.min(branch2);
    }
    Ok(out)
}

/// Certificate block attached to optimizer output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub schema_version: u32,
    pub m_plus: [f64; 3],
    pub m_minus: [f64; 3],
    /// `ceil(M_i / m_i^-)`; `None` for types with no mass.
    pub count_upper: [Option<u64>; 3],
    /// Upper bound on the per-type Lagrange multiplier:
    /// `(1/2pi) sum_j Gamma_ij M_j + sqrt(c2 / m_i^-)`.
    pub lagrange_estimate: [f64; 3],
    /// Empirical comparability constants `c1 r^2 <= m <= c2 r^2`.
    pub c1: f64,
    pub c2: f64,
    /// Isoperimetric constant used in the lower bound (`2 sqrt(pi c1)`).
    pub big_c2: f64,
    pub energy_upper: f64,
}

pub fn bounds_report(
    m_totals: [f64; 3],
    gamma: &GammaMatrix,
    energy_upper: f64,
    comparability: (f64, f64),
) -> Result<BoundsReport> {
    let (c1, c2) = comparability;
    // Per-lobe isoperimetric constant: p >= 2 sqrt(pi m) and m >= c1 r^2
    // give p >= 2 sqrt(pi c1) r per lobe.
    let big_c2 = 2.0 * (PI * c1).sqrt();
    let m_minus = mass_lower_bound(m_totals, gamma, energy_upper, c1, c2, big_c2)?;
    let m_plus = mass_upper_bound(gamma);
    let mut count_upper = [None; 3];
    let mut lagrange = [0.0; 3];
    for i in 0..3 {
        if m_totals[i] > 0.0 {
            count_upper[i] = Some((m_totals[i] / m_minus[i]).ceil() as u64);
            lagrange[i] = gamma.row_dot(i, m_totals) / (2.0 * PI) + (c2 / m_minus[i]).sqrt();
        } else {
            count_upper[i] = Some(0);
        }
    }
    Ok(BoundsReport {
        schema_version: 1,
        m_plus,
        m_minus,
        count_upper,
        lagrange_estimate: lagrange,
        c1,
        c2,
        big_c2,
        energy_upper,
    })
}

/// Fixed mass sample used to calibrate the comparability constants: singles,
/// equal-mass clusters and log-spaced asymmetric triples and doubles.
pub fn default_comparability_grid() -> Vec<MassTriple> {
    let mut grid = Vec::new();
    grid.push(MassTriple::new([1.0, 0.0, 0.0]).unwrap());
    grid.push(MassTriple::new([1.0, 1.0, 1.0]).unwrap());
    grid.push(MassTriple::new([1.0, 1.0, 0.0]).unwrap());
    for &a in &[1e-2, 1e-1, 0.5, 1.0] {
        for &b in &[1e-2, 1e-1, 0.5, 1.0] {
            if b <= a {
                grid.push(MassTriple::new([1.0, a, b]).unwrap());
            }
        }
        grid.push(MassTriple::new([1.0, a, 0.0]).unwrap());
    }
    grid
}

/// Comparability constants over the default calibration grid.
pub fn default_comparability() -> Result<(f64, f64)> {
    geometry::comparability_constants(&default_comparability_grid())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_values() {
        let g = GammaMatrix::diagonal([1.0, 8.0, 0.0]).unwrap();
        let m = mass_upper_bound(&g);
        assert!((m[0] - 8.0 * PI).abs() < 1e-12);
        assert!((m[1] - 2.0 * PI).abs() < 1e-12);
        assert!(m[2].is_infinite());
    }

    #[test]
    fn lower_bound_zero_gamma_uses_energy_branch() {
        let g = GammaMatrix::zero();
        let m = mass_lower_bound([1.0, 0.0, 0.0], &g, 10.0, 1.0, 2.0, 3.0).unwrap();
        // First branch infinite, so the bound is the energy branch.
        let expect = 1.0 * (3.0f64 * 1.0 / (4.0 * 2.0 * 10.0)).powi(2);
        assert!((m[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_symmetric_data() {
        let g = GammaMatrix::identity();
        let m = mass_lower_bound([1.0, 1.0, 1.0], &g, 12.0, 2.0, 3.0, 4.0).unwrap();
        assert!((m[0] - m[1]).abs() < 1e-15 && (m[1] - m[2]).abs() < 1e-15);
        assert!(m[0] > 0.0);
    }

    #[test]
    fn singles_grid_gives_pi() {
        let grid = vec![
            MassTriple::new([1.0, 0.0, 0.0]).unwrap(),
            MassTriple::new([0.0, 3.0, 0.0]).unwrap(),
        ];
        let (c1, c2) = geometry::comparability_constants(&grid).unwrap();
        assert!((c1 - PI).abs() < 1e-12 && (c2 - PI).abs() < 1e-12);
    }

    #[test]
    fn mixed_grid_constants_bracket() {
        let (c1, c2) = default_comparability().unwrap();
        assert!(c1 > 0.0 && c1 < c2);
        // Singles are in the grid, so c2 >= pi >= c1.
        assert!(c2 >= PI - 1e-12 && c1 <= PI + 1e-12);
    }

    #[test]
    fn report_counts() {
        let g = GammaMatrix::identity();
        let r = bounds_report([40.0, 0.0, 0.0], &g, 76.0, (2.0, PI)).unwrap();
        assert!(r.m_minus[0] > 0.0);
        assert!(r.count_upper[0].unwrap() >= 1);
        assert_eq!(r.count_upper[1], Some(0));
        assert!(r.lagrange_estimate[0] > 0.0);
    }
}
