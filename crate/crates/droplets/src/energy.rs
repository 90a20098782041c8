//! Leading-order droplet energy of a bubble and of configurations.
//!
//! For one bubble with lobe masses `m` the energy is the cluster perimeter
//! plus the quadratic interaction `sum_ij Gamma_ij m_i m_j / (4 pi)`; the
//! perimeter term dispatches on the zero pattern of `m` (triple, double or
//! single bubble). A configuration's energy is the sum over its bubbles.

use crate::error::{Error, Result};
use crate::geometry::{self, MassTriple, TripleCache};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Symmetric 3x3 interaction coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix {
    g: [[f64; 3]; 3],
}

impl GammaMatrix {
    /// Validates exact symmetry, finiteness and nonnegative diagonal.
    pub fn new(g: [[f64; 3]; 3]) -> Result<GammaMatrix> {
        for i in 0..3 {
            for j in 0..3 {
                if !g[i][j].is_finite() {
                    return Err(Error::domain("interaction matrix entries must be finite"));
                }
                if g[i][j] != g[j][i] {
                    return Err(Error::domain(format!(
                        "interaction matrix must be symmetric: entry ({i},{j}) = {} vs ({j},{i}) = {}",
                        g[i][j], g[j][i]
                    )));
                }
            }
            if g[i][i] < 0.0 {
                return Err(Error::domain("diagonal interaction entries must be nonnegative"));
            }
        }
        Ok(GammaMatrix { g })
    }

    pub fn zero() -> GammaMatrix {
        GammaMatrix { g: [[0.0; 3]; 3] }
    }

    pub fn diagonal(d: [f64; 3]) -> Result<GammaMatrix> {
        GammaMatrix::new([
            [d[0], 0.0, 0.0],
            [0.0, d[1], 0.0],
            [0.0, 0.0, d[2]],
        ])
    }

    pub fn identity() -> GammaMatrix {
        GammaMatrix::diagonal([1.0, 1.0, 1.0]).unwrap()
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.g
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.g[i][j]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.g[i][j] == 0.0))
    }

    /// `(Gamma m)_i / (2 pi)`, the interaction part of the energy gradient.
    pub fn row_dot(&self, i: usize, m: [f64; 3]) -> f64 {
        self.g[i][0] * m[0] + self.g[i][1] * m[1] + self.g[i][2] * m[2]
    }

    /// `m^T Gamma m / (4 pi)`.
    pub fn quadratic(&self, m: [f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.g[i][j] * m[i] * m[j];
            }
        }
        s / (4.0 * PI)
    }
}

/// A finite list of bubbles dividing the total masses `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    bubbles: Vec<MassTriple>,
    totals: [f64; 3],
}

impl Configuration {
    /// Validates that per-type bubble masses sum to `totals` (relative
    /// tolerance 1e-12) and that every bubble has a positive lobe.
    pub fn new(bubbles: Vec<MassTriple>, totals: [f64; 3]) -> Result<Configuration> {
        if bubbles.is_empty() {
            return Err(Error::domain("configuration must contain at least one bubble"));
        }
        let scale = totals.iter().cloned().fold(1.0f64, f64::max);
        for i in 0..3 {
            let sum: f64 = bubbles.iter().map(|b| b.get(i)).sum();
            if (sum - totals[i]).abs() > 1e-12 * scale {
                return Err(Error::domain(format!(
                    "type {} masses sum to {sum}, expected {}",
                    i + 1,
                    totals[i]
                )));
            }
        }
        Ok(Configuration { bubbles, totals })
    }

    /// Builds a configuration with totals computed from the bubbles.
    pub fn from_bubbles(bubbles: Vec<MassTriple>) -> Result<Configuration> {
        let mut totals = [0.0; 3];
        for b in &bubbles {
            for i in 0..3 {
                totals[i] += b.get(i);
            }
        }
        Configuration::new(bubbles, totals)
    }

    pub fn bubbles(&self) -> &[MassTriple] {
        &self.bubbles
    }

    pub fn totals(&self) -> [f64; 3] {
        self.totals
    }

    pub fn len(&self) -> usize {
        self.bubbles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bubbles.is_empty()
    }
}

/// Gradient entry of `e0` for one lobe. Zero lobes are structurally absent
/// rather than at a stationary interior point, so they are flagged inactive
/// instead of being given a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LobeGradient {
    Active(f64),
    Inactive,
}

impl LobeGradient {
    pub fn value(self) -> Option<f64> {
        match self {
            LobeGradient::Active(v) => Some(v),
            LobeGradient::Inactive => None,
        }
    }
}

/// Leading-order energy of one bubble: perimeter plus the quadratic
/// interaction of its lobe masses.
pub fn e0(m: &MassTriple, gamma: &GammaMatrix) -> Result<f64> {
    let mut cache = TripleCache::new();
    e0_cached(&mut cache, m, gamma)
}

/// As [`e0`] with a reusable geometry cache (hot path of the optimizer).
pub fn e0_cached(cache: &mut TripleCache, m: &MassTriple, gamma: &GammaMatrix) -> Result<f64> {
    let geo = geometry::solve_cluster_cached(cache, m)?;
    Ok(geo.perimeter + gamma.quadratic(m.masses()))
}

/// Gradient of `e0`: `g_i = (Gamma m)_i / (2 pi) + 1/r_i` for positive
/// lobes; inactive for zero lobes.
pub fn e0_gradient(m: &MassTriple, gamma: &GammaMatrix) -> Result<[LobeGradient; 3]> {
    let mut cache = TripleCache::new();
    e0_gradient_cached(&mut cache, m, gamma)
}

pub fn e0_gradient_cached(
    cache: &mut TripleCache,
    m: &MassTriple,
    gamma: &GammaMatrix,
) -> Result<[LobeGradient; 3]> {
    let geo = geometry::solve_cluster_cached(cache, m)?;
    let masses = m.masses();
    let mut out = [LobeGradient::Inactive; 3];
    for i in 0..3 {
        if let Some(kappa) = geo.outer_curvature(i) {
            out[i] = LobeGradient::Active(gamma.row_dot(i, masses) / (2.0 * PI) + kappa);
        }
    }
    Ok(out)
}

/// Total energy of a configuration: the sum of `e0` over its bubbles,
/// accumulated with compensated summation so the value is independent of
/// bubble order.
pub fn configuration_energy(c: &Configuration, gamma: &GammaMatrix) -> Result<f64> {
    let mut cache = TripleCache::new();
    configuration_energy_cached(&mut cache, c, gamma)
}

pub fn configuration_energy_cached(
    cache: &mut TripleCache,
    c: &Configuration,
    gamma: &GammaMatrix,
) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for b in c.bubbles() {
        let e = e0_cached(cache, b, gamma)?;
        // Kahan update.
        let y = e - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mt(m: [f64; 3]) -> MassTriple {
        MassTriple::new(m).unwrap()
    }

    #[test]
    fn single_bubble_formula() {
        // Single bubble of mass 4 pi with unit self-interaction:
        // 2 sqrt(pi * 4 pi) + (4 pi)^2 / (4 pi) = 4 pi + 4 pi.
        let e = e0(&mt([4.0 * PI, 0.0, 0.0]), &GammaMatrix::identity()).unwrap();
        assert!((e - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_gamma_reduces_to_perimeter() {
        let m = mt([1.0, 2.0, 0.5]);
        let e = e0(&m, &GammaMatrix::zero()).unwrap();
        let p = geometry::perimeter(&m).unwrap();
        assert!((e - p).abs() < 1e-13);
    }

    #[test]
    fn double_cross_term() {
        // Gamma12 = 2 pi, zero diagonal: cross term is exactly 1.
        let gamma = GammaMatrix::new([
            [0.0, 2.0 * PI, 0.0],
            [2.0 * PI, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ])
        .unwrap();
        let e = e0(&mt([1.0, 1.0, 0.0]), &gamma).unwrap();
        let pd = geometry::double_perimeter(1.0, 1.0).unwrap();
        assert!((e - (pd + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gradient_single_lobe() {
        // r = 1, so 1/r = 1 and the interaction part is pi/(2 pi) = 1/2.
        let g = e0_gradient(&mt([PI, 0.0, 0.0]), &GammaMatrix::identity()).unwrap();
        assert!((g[0].value().unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(g[1], LobeGradient::Inactive);
    }

    #[test]
    fn gradient_reduces_to_perimeter_gradient() {
        let m = mt([1.0, 1.0, 1.0]);
        let g = e0_gradient(&m, &GammaMatrix::zero()).unwrap();
        let pg = geometry::perimeter_gradient(&m).unwrap();
        for i in 0..3 {
            assert!((g[i].value().unwrap() - pg[i].unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let gamma = GammaMatrix::new([
            [1.0, 0.3, 0.1],
            [0.3, 2.0, 0.2],
            [0.1, 0.2, 0.5],
        ])
        .unwrap();
        let base = [2.0, 1.0, 0.5];
        let g = e0_gradient(&mt(base), &gamma).unwrap();
        let h = 1e-5;
        for i in 0..3 {
            let mut up = base;
            let mut dn = base;
            up[i] += h;
            dn[i] -= h;
            let fd = (e0(&mt(up), &gamma).unwrap() - e0(&mt(dn), &gamma).unwrap()) / (2.0 * h);
            let gi = g[i].value().unwrap();
            assert!(
                ((gi - fd) / gi).abs() < 1e-6,
                "lobe {i}: analytic {gi} vs fd {fd}"
            );
        }
    }

    #[test]
    fn permutation_equivariance() {
        let gamma = GammaMatrix::new([
            [1.0, 0.5, 0.0],
            [0.5, 2.0, 0.7],
            [0.0, 0.7, 0.3],
        ])
        .unwrap();
        let e_base = e0(&mt([2.0, 1.0, 0.5]), &gamma).unwrap();
        // Swap lobes 1 and 2 together with the matching rows/columns.
        let swapped = GammaMatrix::new([
            [2.0, 0.5, 0.7],
            [0.5, 1.0, 0.0],
            [0.7, 0.0, 0.3],
        ])
        .unwrap();
        let e_swap = e0(&mt([1.0, 2.0, 0.5]), &swapped).unwrap();
        assert!((e_base - e_swap).abs() < 1e-12 * e_base);
    }

    #[test]
    fn continuity_across_kinds() {
        let gamma = GammaMatrix::identity();
        let e_double = e0(&mt([1.0, 1.0, 0.0]), &gamma).unwrap();
        let e_near = e0(&mt([1.0, 1.0, 1e-8]), &gamma).unwrap();
        assert!((e_near - e_double).abs() < 1e-3);
        let e_single = e0(&mt([1.0, 0.0, 0.0]), &gamma).unwrap();
        let e_near_single = e0(&mt([1.0, 1e-8, 0.0]), &gamma).unwrap();
        assert!((e_near_single - e_single).abs() < 1e-3);
    }

    #[test]
    fn monotone_in_diagonal_gamma() {
        let m = mt([1.0, 1.0, 1.0]);
        let lo = e0(&m, &GammaMatrix::diagonal([1.0, 1.0, 1.0]).unwrap()).unwrap();
        let hi = e0(&m, &GammaMatrix::diagonal([1.5, 1.0, 1.0]).unwrap()).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn configuration_energy_sums() {
        let c = Configuration::from_bubbles(vec![
            mt([PI, 0.0, 0.0]),
            mt([PI, 0.0, 0.0]),
        ])
        .unwrap();
        let e = configuration_energy(&c, &GammaMatrix::zero()).unwrap();
        assert!((e - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn merging_beats_three_singles_without_interaction() {
        let triple = Configuration::from_bubbles(vec![mt([1.0, 1.0, 1.0])]).unwrap();
        let singles = Configuration::from_bubbles(vec![
            mt([1.0, 0.0, 0.0]),
            mt([0.0, 1.0, 0.0]),
            mt([0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let gamma = GammaMatrix::zero();
        assert!(
            configuration_energy(&triple, &gamma).unwrap()
                < configuration_energy(&singles, &gamma).unwrap()
        );
    }

    #[test]
    fn five_singles_closed_form() {
        // f(n) = 2 sqrt(40 pi n) + 1600/(4 pi n) at n = 5.
        let bubbles: Vec<MassTriple> = (0..5).map(|_| mt([8.0, 0.0, 0.0])).collect();
        let c = Configuration::from_bubbles(bubbles).unwrap();
        let e = configuration_energy(&c, &GammaMatrix::identity()).unwrap();
        let expect = 2.0 * (40.0 * PI * 5.0).sqrt() + 1600.0 / (4.0 * PI * 5.0);
        assert!((e - expect).abs() < 1e-10);
    }

    #[test]
    fn gamma_validation() {
        assert!(GammaMatrix::new([
            [0.0, 1.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ])
        .is_err());
        assert!(GammaMatrix::new([
            [-1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ])
        .is_err());
    }

    #[test]
    fn configuration_validation() {
        assert!(Configuration::new(vec![mt([1.0, 0.0, 0.0])], [2.0, 0.0, 0.0]).is_err());
        assert!(MassTriple::new([0.0, 0.0, 0.0]).is_err());
    }
}
