//! Exhaustive verification oracle for small instances.
//!
//! Independent of the main optimizer: enumerates every signature with up to
//! `max_bubbles` bubbles (no exclusion rules) and every split of the totals
//! on a mass grid, then polishes each signature's best grid point through
//! the KKT system. Guaranteed to land within `Lipschitz(e0) * grid_step *
//! lobes` of the true optimum over that class before polish.

use super::inner::{optimize_classes, to_bubbles, ClassProblem, ClassSpec, Effort};
use super::signature::Signature;
use crate::energy::{e0_cached, Configuration, GammaMatrix};
use crate::error::{Error, Result};
use crate::geometry::{MassTriple, TripleCache};

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub configuration: Configuration,
    pub energy: f64,
    pub grid_points_evaluated: u64,
}

/// All integer compositions of `total` into `parts` nonnegative summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(total: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = total;
            out.push(cur.clone());
            return;
        }
        for v in 0..=total {
            cur[pos] = v;
            rec(total - v, pos + 1, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, 0, &mut cur, &mut out);
    out
}

fn count_compositions(total: usize, parts: usize) -> u128 {
    // C(total + parts - 1, parts - 1)
    if parts == 0 {
        return if total == 0 { 1 } else { 0 };
    }
    let mut c: u128 = 1;
    for k in 0..(parts - 1) {
        c = c * (total + k + 1) as u128 / (k + 1) as u128;
    }
    c
}

fn signatures_up_to(m_totals: [f64; 3], max_bubbles: usize) -> Vec<Signature> {
    let pos = |i: usize| m_totals[i] > 0.0;
    let mut out = Vec::new();
    let t_max = if (0..3).all(pos) { max_bubbles } else { 0 };
    for t in 0..=t_max {
        for d01 in 0..=(max_bubbles - t) {
            if d01 > 0 && !(pos(0) && pos(1)) {
                break;
            }
            for d02 in 0..=(max_bubbles - t - d01) {
                if d02 > 0 && !(pos(0) && pos(2)) {
                    break;
                }
                for d12 in 0..=(max_bubbles - t - d01 - d02) {
                    if d12 > 0 && !(pos(1) && pos(2)) {
                        break;
                    }
                    let left = max_bubbles - t - d01 - d02 - d12;
                    for s0 in 0..=left {
                        if s0 > 0 && !pos(0) {
                            break;
                        }
                        for s1 in 0..=(left - s0) {
                            if s1 > 0 && !pos(1) {
                                break;
                            }
                            for s2 in 0..=(left - s0 - s1) {
                                if s2 > 0 && !pos(2) {
                                    break;
                                }
                                let sig = Signature {
                                    n_triple: t,
                                    n_double: [d01, d02, d12],
                                    n_single: [s0, s1, s2],
                                };
                                if sig.total_bubbles() == 0 {
                                    continue;
                                }
                                if sig.is_feasible_for(m_totals) {
                                    out.push(sig);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive grid search over all configurations with at most `max_bubbles`
/// bubbles, each signature's best refined by one local polish.
pub fn brute_force_oracle(
    m_totals: [f64; 3],
    gamma: &GammaMatrix,
    max_bubbles: usize,
    grid_step: f64,
    budget: u64,
) -> Result<OracleResult> {
    if max_bubbles == 0 || max_bubbles > 3 {
        return Err(Error::domain("oracle supports 1..=3 bubbles"));
    }
    if !(grid_step > 0.0) {
        return Err(Error::domain("grid step must be positive"));
    }
    let signatures = signatures_up_to(m_totals, max_bubbles);
    let mut cache = TripleCache::new();
    let mut evaluated: u64 = 0;
    let mut best_global: Option<(f64, Configuration)> = None;

    // Pre-check the total work against the budget.
    let mut work: u128 = 0;
    for sig in &signatures {
        let mut w: u128 = 1;
        for i in 0..3 {
            if m_totals[i] > 0.0 {
                let g = ((m_totals[i] / grid_step).round() as usize).max(1);
                w = w.saturating_mul(count_compositions(g, sig.lobe_count(i)));
            }
        }
        work = work.saturating_add(w);
    }
    if work > budget as u128 {
        return Err(Error::domain(format!(
            "oracle grid of {work} points exceeds the budget of {budget}"
        )));
    }

    for sig in &signatures {
        // Slot layout: bubbles in class order, each bubble's lobes in type
        // order; per-type slot lists drive the composition assignment.
        let mut bubble_types: Vec<Vec<usize>> = Vec::new();
        for (types, count) in sig.classes() {
            for _ in 0..count {
                bubble_types.push(types.clone());
            }
        }
        let mut slot_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 3]; // type -> (bubble, lobe)
        for (bi, types) in bubble_types.iter().enumerate() {
            for &t in types {
                slot_of[t].push((bi, t));
            }
        }
        let mut per_type: Vec<(usize, Vec<Vec<usize>>, f64)> = Vec::new(); // (type, comps, unit)
        for i in 0..3 {
            if m_totals[i] <= 0.0 {
                continue;
            }
            let g = ((m_totals[i] / grid_step).round() as usize).max(1);
            per_type.push((i, compositions(g, slot_of[i].len()), m_totals[i] / g as f64));
        }

        // Iterate the cartesian product of per-type compositions.
        let mut idx = vec![0usize; per_type.len()];
        let mut best_sig: Option<(f64, Vec<MassTriple>)> = None;
        'product: loop {
            let mut masses = vec![[0.0f64; 3]; bubble_types.len()];
            for (k, (i, comps, unit)) in per_type.iter().enumerate() {
                for (slot_pos, &(bi, t)) in slot_of[*i].iter().enumerate() {
                    masses[bi][t] = comps[idx[k]][slot_pos] as f64 * unit;
                }
            }
            evaluated += 1;
            let mut energy = 0.0;
            let mut ok = true;
            let mut bubbles = Vec::with_capacity(masses.len());
            for m in &masses {
                if m.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let mt = MassTriple::new(*m)?;
                match e0_cached(&mut cache, &mt, gamma) {
                    Ok(e) => energy += e,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
                bubbles.push(mt);
            }
            if ok && !bubbles.is_empty() {
                if best_sig.as_ref().map_or(true, |(be, _)| energy < *be) {
                    best_sig = Some((energy, bubbles));
                }
            }
            // Advance the product index.
            for k in 0..per_type.len() {
                idx[k] += 1;
                if idx[k] < per_type[k].1.len() {
                    continue 'product;
                }
                idx[k] = 0;
            }
            break;
        }

        let Some((_, bubbles)) = best_sig else { continue };
        // One local polish from the best grid point of this signature.
        let problem = ClassProblem {
            classes: bubbles
                .iter()
                .map(|b| ClassSpec {
                    types: (0..3).filter(|&i| b.get(i) > 0.0).collect(),
                    count: 1,
                })
                .collect(),
            totals: m_totals,
        };
        if let Ok(r) = optimize_classes(&problem, gamma, 1, 1, Effort::Full, &mut cache) {
            let polished = to_bubbles(&problem, &r.x);
            if let Ok(cfg) = Configuration::new(polished, m_totals) {
                if best_global.as_ref().map_or(true, |(be, _)| r.energy < *be) {
                    best_global = Some((r.energy, cfg));
                }
            }
        }
    }

    let (energy, configuration) = best_global.ok_or_else(|| {
        Error::numeric("oracle found no feasible configuration", f64::INFINITY)
    })?;
    Ok(OracleResult {
        configuration,
        energy,
        grid_points_evaluated: evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_triple_wins_without_interaction() {
        let r = brute_force_oracle([1.0, 1.0, 1.0], &GammaMatrix::zero(), 2, 0.25, 2_000_000)
            .unwrap();
        assert_eq!(r.configuration.len(), 1);
        let p = crate::geometry::perimeter(&MassTriple::new([1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((r.energy - p).abs() < 1e-7);
    }

    #[test]
    fn single_pi_stays_whole() {
        let r = brute_force_oracle([PI, 0.0, 0.0], &GammaMatrix::identity(), 3, 0.2, 2_000_000)
            .unwrap();
        assert_eq!(r.configuration.len(), 1);
        let expect = 2.0 * PI + PI * PI / (4.0 * PI);
        assert!((r.energy - expect).abs() < 1e-8);
    }

    #[test]
    fn budget_guard_fires() {
        let r = brute_force_oracle([10.0, 10.0, 10.0], &GammaMatrix::zero(), 3, 1e-4, 1000);
        assert!(r.is_err());
    }
}
