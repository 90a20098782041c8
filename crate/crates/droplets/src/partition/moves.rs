//! The comparison moves behind the mass bounds: split half a lobe into a new
//! single bubble, or merge bubbles lobe-wise. An optimum must admit no
//! strictly improving move.

use crate::energy::{configuration_energy_cached, Configuration, GammaMatrix};
use crate::error::Result;
use crate::geometry::{MassTriple, TripleCache};

/// Scan all split/merge candidates and return the best strictly improving
/// configuration, or `None` at a move-stable point.
pub fn merge_split_moves(
    c: &Configuration,
    gamma: &GammaMatrix,
) -> Result<Option<Configuration>> {
    let mut cache = TripleCache::new();
    let base = configuration_energy_cached(&mut cache, c, gamma)?;
    let tol = 1e-12 * base.abs().max(1.0);
    let totals = c.totals();
    let mut best: Option<(f64, Configuration)> = None;
    let mut consider = |cand: Vec<MassTriple>, cache: &mut TripleCache| -> Result<()> {
        let Ok(cfg) = Configuration::new(cand, totals) else {
            return Ok(());
        };
        let e = configuration_energy_cached(cache, &cfg, gamma)?;
        if e < base - tol && best.as_ref().map_or(true, |(be, _)| e < *be) {
            best = Some((e, cfg));
        }
        Ok(())
    };

    // Split moves: half of lobe i of bubble k becomes a new single bubble.
    for (k, b) in c.bubbles().iter().enumerate() {
        for i in 0..3 {
            let m = b.get(i);
            if m <= 0.0 {
                continue;
            }
            let mut masses = b.masses();
            masses[i] = m / 2.0;
            let mut cand: Vec<MassTriple> = c.bubbles().to_vec();
            cand[k] = MassTriple::new(masses)?;
            cand.push(MassTriple::single(i, m / 2.0)?);
            consider(cand, &mut cache)?;
        }
    }

    // Merge moves: combine two bubbles lobe-wise.
    let n = c.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let ma = c.bubbles()[a].masses();
            let mb = c.bubbles()[b].masses();
            let merged = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
            let mut cand: Vec<MassTriple> = Vec::with_capacity(n - 1);
            for (k, bub) in c.bubbles().iter().enumerate() {
                if k != a && k != b {
                    cand.push(*bub);
                }
            }
            cand.push(MassTriple::new(merged)?);
            consider(cand, &mut cache)?;
        }
    }

    // Merge all singles of one type into one bubble.
    for i in 0..3 {
        let singles: Vec<usize> = c
            .bubbles()
            .iter()
            .enumerate()
            .filter(|(_, b)| matches!(b.kind(), crate::geometry::BubbleKind::Single(t) if t == i))
            .map(|(k, _)| k)
            .collect();
        if singles.len() > 2 {
            let total: f64 = singles.iter().map(|&k| c.bubbles()[k].get(i)).sum();
            let mut cand: Vec<MassTriple> = c
                .bubbles()
                .iter()
                .enumerate()
                .filter(|(k, _)| !singles.contains(k))
                .map(|(_, b)| *b)
                .collect();
            cand.push(MassTriple::single(i, total)?);
            consider(cand, &mut cache)?;
        }
    }

    Ok(best.map(|(_, cfg)| cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn oversized_single_splits() {
        // m > m+ = 8 pi: splitting in half strictly decreases the energy.
        let gamma = GammaMatrix::identity();
        let m = 9.0 * PI;
        let c = Configuration::from_bubbles(vec![MassTriple::single(0, m).unwrap()]).unwrap();
        let improved = merge_split_moves(&c, &gamma).unwrap();
        assert!(improved.is_some());
        assert_eq!(improved.unwrap().len(), 2);
    }

    #[test]
    fn different_type_singles_merge() {
        let gamma = GammaMatrix::zero();
        let c = Configuration::from_bubbles(vec![
            MassTriple::single(0, 1.0).unwrap(),
            MassTriple::single(1, 1.0).unwrap(),
        ])
        .unwrap();
        let improved = merge_split_moves(&c, &gamma).unwrap().unwrap();
        assert_eq!(improved.len(), 1);
        let e_merged = crate::energy::configuration_energy(&improved, &gamma).unwrap();
        assert!(e_merged < 4.0 * PI.sqrt());
    }

    #[test]
    fn optimal_five_singles_are_stable() {
        let gamma = GammaMatrix::identity();
        let bubbles: Vec<MassTriple> =
            (0..5).map(|_| MassTriple::single(0, 8.0).unwrap()).collect();
        let c = Configuration::from_bubbles(bubbles).unwrap();
        assert!(merge_split_moves(&c, &gamma).unwrap().is_none());
    }
}
