//! Discrete skeletons of configurations: how many bubbles of each class.

use crate::energy::GammaMatrix;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Unordered lobe pairs of double bubbles, indexing `n_double`.
pub const DOUBLE_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Bubble-class counts: triples, doubles per pair, singles per type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_triple: usize,
    pub n_double: [usize; 3],
    pub n_single: [usize; 3],
}

impl Signature {
    pub fn total_bubbles(&self) -> usize {
        self.n_triple
            + self.n_double.iter().sum::<usize>()
            + self.n_single.iter().sum::<usize>()
    }

    /// Number of lobe slots of type `i`.
    pub fn lobe_count(&self, i: usize) -> usize {
        let mut n = self.n_triple + self.n_single[i];
        for (k, &(a, b)) in DOUBLE_PAIRS.iter().enumerate() {
            if a == i || b == i {
                n += self.n_double[k];
            }
        }
        n
    }

    /// Classes as (type list, count), triples first, deterministic order.
    pub fn classes(&self) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::new();
        if self.n_triple > 0 {
            out.push((vec![0, 1, 2], self.n_triple));
        }
        for (k, &(a, b)) in DOUBLE_PAIRS.iter().enumerate() {
            if self.n_double[k] > 0 {
                out.push((vec![a, b], self.n_double[k]));
            }
        }
        for i in 0..3 {
            if self.n_single[i] > 0 {
                out.push((vec![i], self.n_single[i]));
            }
        }
        out
    }

    /// Every positive total must be covered by at least one lobe slot.
    pub fn is_feasible_for(&self, m_totals: [f64; 3]) -> bool {
        (0..3).all(|i| m_totals[i] == 0.0 || self.lobe_count(i) > 0)
    }

    /// Deterministic sort key.
    pub fn key(&self) -> [usize; 7] {
        [
            self.n_triple,
            self.n_double[0],
            self.n_double[1],
            self.n_double[2],
            self.n_single[0],
            self.n_single[1],
            self.n_single[2],
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub signatures: Vec<Signature>,
    /// Whether the diagonal-interaction exclusion rules were applied.
    pub rules_applied: bool,
    pub pruned_by_rules: usize,
    pub per_type_cap: [usize; 3],
}

/// Exclusion rules valid for diagonal interaction matrices: no two single
/// bubbles of different types (merging them into a double is favorable), and
/// no single of type `i` alongside a double lacking type `i` (merging into a
/// triple is favorable).
fn violates_diagonal_rules(sig: &Signature) -> bool {
    let single_types: Vec<usize> = (0..3).filter(|&i| sig.n_single[i] > 0).collect();
    if single_types.len() > 1 {
        return true;
    }
    if let [i] = single_types.as_slice() {
        for (k, &(a, b)) in DOUBLE_PAIRS.iter().enumerate() {
            if sig.n_double[k] > 0 && a != *i && b != *i {
                return true;
            }
        }
    }
    false
}

/// All signatures with per-type lobe counts at most
/// `min(count_cap, ceil(M_i / m_i^-))`, over the types with positive mass.
/// With a diagonal interaction matrix the exclusion rules prune the list.
pub fn enumerate_signatures(
    m_totals: [f64; 3],
    gamma: &GammaMatrix,
    count_cap: usize,
    m_minus: [f64; 3],
) -> Result<Enumeration> {
    if count_cap == 0 {
        return Err(Error::domain("count cap must be at least 1"));
    }
    let mut cap = [0usize; 3];
    for i in 0..3 {
        if m_totals[i] > 0.0 {
            let by_bound = if m_minus[i] > 0.0 {
                (m_totals[i] / m_minus[i]).ceil().min(1e9) as usize
            } else {
                count_cap
            };
            cap[i] = count_cap.min(by_bound).max(1);
        }
    }
    let rules = gamma.is_diagonal();
    let can_pair = |a: usize, b: usize| cap[a] > 0 && cap[b] > 0;
    let mut signatures = Vec::new();
    let mut pruned = 0usize;

    let t_max = if cap.iter().all(|&c| c > 0) {
        *cap.iter().min().unwrap()
    } else {
        0
    };
    for t in 0..=t_max {
        let d01_max = if can_pair(0, 1) {
            cap[0].min(cap[1]).saturating_sub(t)
        } else {
            0
        };
        for d01 in 0..=d01_max {
            let d02_max = if can_pair(0, 2) {
                (cap[0].saturating_sub(t + d01)).min(cap[2].saturating_sub(t))
            } else {
                0
            };
            for d02 in 0..=d02_max {
                let d12_max = if can_pair(1, 2) {
                    (cap[1].saturating_sub(t + d01)).min(cap[2].saturating_sub(t + d02))
                } else {
                    0
                };
                for d12 in 0..=d12_max {
                    let s_max = [
                        cap[0].saturating_sub(t + d01 + d02),
                        cap[1].saturating_sub(t + d01 + d12),
                        cap[2].saturating_sub(t + d02 + d12),
                    ];
                    for s0 in 0..=s_max[0] {
                        for s1 in 0..=s_max[1] {
                            for s2 in 0..=s_max[2] {
                                let sig = Signature {
                                    n_triple: t,
                                    n_double: [d01, d02, d12],
                                    n_single: [s0, s1, s2],
                                };
                                if sig.total_bubbles() == 0 {
                                    continue;
                                }
                                if rules && violates_diagonal_rules(&sig) {
                                    pruned += 1;
                                    continue;
                                }
                                signatures.push(sig);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Enumeration {
        signatures,
        rules_applied: rules,
        pruned_by_rules: pruned,
        per_type_cap: cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_type_only() {
        let g = GammaMatrix::identity();
        let e = enumerate_signatures([40.0, 0.0, 0.0], &g, 6, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.signatures.len(), 6);
        for sig in &e.signatures {
            assert_eq!(sig.n_triple, 0);
            assert_eq!(sig.n_double, [0, 0, 0]);
            assert_eq!(sig.n_single[1] + sig.n_single[2], 0);
            assert!(sig.n_single[0] >= 1 && sig.n_single[0] <= 6);
        }
    }

    #[test]
    fn cap_one_all_positive() {
        // One bubble: one triple, three doubles, three singles. No
        // multi-bubble rule can fire at cap 1.
        let g = GammaMatrix::identity();
        let e = enumerate_signatures([1.0, 1.0, 1.0], &g, 1, [0.1; 3]).unwrap();
        assert_eq!(e.signatures.len(), 7);
    }

    #[test]
    fn diagonal_rules_prune_mixed_singles() {
        let g = GammaMatrix::identity();
        let e = enumerate_signatures([1.0, 1.0, 1.0], &g, 2, [1e-6; 3]).unwrap();
        for sig in &e.signatures {
            let kinds = (0..3).filter(|&i| sig.n_single[i] > 0).count();
            assert!(kinds <= 1, "mixed singles in {sig:?}");
        }
        assert!(e.pruned_by_rules > 0);
    }

    #[test]
    fn general_gamma_keeps_everything() {
        let g = GammaMatrix::new([
            [1.0, 0.5, 0.0],
            [0.5, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        let e = enumerate_signatures([1.0, 1.0, 1.0], &g, 2, [1e-6; 3]).unwrap();
        assert!(!e.rules_applied);
        assert_eq!(e.pruned_by_rules, 0);
        let mixed = e
            .signatures
            .iter()
            .any(|s| s.n_single[0] > 0 && s.n_single[1] > 0);
        assert!(mixed);
    }

    #[test]
    fn rejects_zero_cap() {
        let g = GammaMatrix::identity();
        assert!(enumerate_signatures([1.0, 0.0, 0.0], &g, 0, [0.0; 3]).is_err());
    }
}
