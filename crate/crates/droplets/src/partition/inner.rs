//! Continuous mass optimization for a fixed signature.
//!
//! The inner problem minimizes the summed bubble energies over the lobe
//! masses subject to per-type conservation and nonnegativity. Bubbles of the
//! same class may be solved collapsed (one mass vector with a multiplicity
//! weight) or expanded one-by-one; both reduce to the same weighted problem.
//! The solver runs projected gradient with Armijo steps, then polishes the
//! active-set KKT system with a damped Newton iteration. Multi-starts are
//! deterministic seeded perturbations of the equal split.
//!
//! A vanishing lobe has divergent marginal perimeter, so zero slots are KKT
//! feasible regardless of the multiplier; they get a large finite surrogate
//! gradient that keeps them parked at zero.

use crate::energy::{e0_cached, e0_gradient_cached, GammaMatrix, LobeGradient};
use crate::error::{Error, Result};
use crate::geometry::{MassTriple, TripleCache};
use crate::linalg::{solve, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One bubble class: lobe types and how many identical bubbles share it.
#[derive(Debug, Clone)]
pub struct ClassSpec {
    pub types: Vec<usize>,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct ClassProblem {
    pub classes: Vec<ClassSpec>,
    pub totals: [f64; 3],
}

#[derive(Debug, Clone)]
pub(crate) struct InnerResult {
    /// Slot masses in class layout order.
    pub x: Vec<f64>,
    pub energy: f64,
    /// Per-type multiplier (weighted mean of active gradients).
    pub multipliers: [Option<f64>; 3],
    /// Per-type max-min spread of active gradients.
    pub kkt_spread: [f64; 3],
    pub converged: bool,
}

struct Layout {
    /// Per slot: (class index, position within class, lobe type).
    slots: Vec<(usize, usize, usize)>,
    class_start: Vec<usize>,
    by_type: [Vec<usize>; 3],
    weight: Vec<f64>,
}

impl Layout {
    fn new(p: &ClassProblem) -> Layout {
        let mut slots = Vec::new();
        let mut class_start = Vec::with_capacity(p.classes.len() + 1);
        let mut by_type: [Vec<usize>; 3] = Default::default();
        let mut weight = Vec::new();
        for (c, class) in p.classes.iter().enumerate() {
            class_start.push(slots.len());
            for (pos, &t) in class.types.iter().enumerate() {
                by_type[t].push(slots.len());
                weight.push(class.count as f64);
                slots.push((c, pos, t));
            }
        }
        class_start.push(slots.len());
        Layout {
            slots,
            class_start,
            by_type,
            weight,
        }
    }

    fn class_masses(&self, _p: &ClassProblem, x: &[f64], c: usize) -> [f64; 3] {
        let mut m = [0.0; 3];
        for s in self.class_start[c]..self.class_start[c + 1] {
            let (_, _, t) = self.slots[s];
            m[t] = x[s];
        }
        m
    }
}

/// Projection onto `{ x >= 0, sum_j w_j x_j = target }` by waterfilling over
/// the breakpoints of `x_j = max(0, y_j - w_j lambda)`.
fn project_weighted_simplex(y: &mut [f64], w: &[f64], idx: &[usize], target: f64) {
    if idx.is_empty() {
        return;
    }
    if target <= 0.0 {
        for &j in idx {
            y[j] = 0.0;
        }
        return;
    }
    let mut bps: Vec<(f64, usize)> = idx.iter().map(|&j| (y[j] / w[j], j)).collect();
    bps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut s_wy = 0.0;
    let mut s_w2 = 0.0;
    let mut lambda = 0.0;
    for (k, &(bp, j)) in bps.iter().enumerate() {
        s_wy += w[j] * y[j];
        s_w2 += w[j] * w[j];
        let cand = (s_wy - target) / s_w2;
        let next_bp = bps.get(k + 1).map(|v| v.0).unwrap_or(f64::NEG_INFINITY);
        if cand <= bp && cand > next_bp {
            lambda = cand;
            break;
        }
        lambda = cand; // fall through keeps the last (full-support) value
    }
    let mut sum = 0.0;
    let mut largest = idx[0];
    for &j in idx {
        y[j] = (y[j] - w[j] * lambda).max(0.0);
        sum += w[j] * y[j];
        if y[j] > y[largest] {
            largest = j;
        }
    }
    // Exact conservation: absorb the rounding residual in the largest slot.
    y[largest] += (target - sum) / w[largest];
    if y[largest] < 0.0 {
        y[largest] = 0.0;
    }
}

struct Evaluator<'a> {
    problem: &'a ClassProblem,
    layout: Layout,
    gamma: &'a GammaMatrix,
    cache: &'a mut TripleCache,
}

impl<'a> Evaluator<'a> {
    /// Total energy; infinite when a geometry solve fails (step rejected).
    fn energy(&mut self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for c in 0..self.problem.classes.len() {
            let m = self.layout.class_masses(self.problem, x, c);
            if m.iter().all(|&v| v <= 0.0) {
                continue;
            }
            let Ok(mt) = MassTriple::new(m) else {
                return f64::INFINITY;
            };
            match e0_cached(self.cache, &mt, self.gamma) {
                Ok(e) => total += self.problem.classes[c].count as f64 * e,
                Err(_) => return f64::INFINITY,
            }
        }
        total
    }

    /// Slot gradient of the per-bubble energy (`d e0 / d m`); zero slots get
    /// a large surrogate that keeps them at the boundary.
    fn gradient(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let mut gmax = 1.0f64;
        let mut inactive: Vec<usize> = Vec::new();
        for c in 0..self.problem.classes.len() {
            let m = self.layout.class_masses(self.problem, x, c);
            let start = self.layout.class_start[c];
            let end = self.layout.class_start[c + 1];
            if m.iter().all(|&v| v <= 0.0) {
                for s in start..end {
                    inactive.push(s);
                }
                continue;
            }
            let mt = MassTriple::new(m)?;
            let g = e0_gradient_cached(self.cache, &mt, self.gamma)?;
            for s in start..end {
                let (_, _, t) = self.layout.slots[s];
                match g[t] {
                    LobeGradient::Active(v) => {
                        out[s] = v;
                        gmax = gmax.max(v.abs());
                    }
                    LobeGradient::Inactive => inactive.push(s),
                }
            }
        }
        for s in inactive {
            out[s] = 1e8 * gmax;
        }
        Ok(())
    }
}

fn equal_split_start(problem: &ClassProblem, layout: &Layout) -> Vec<f64> {
    let mut x = vec![0.0; layout.slots.len()];
    for i in 0..3 {
        let idx = &layout.by_type[i];
        if idx.is_empty() {
            continue;
        }
        let wsum: f64 = idx.iter().map(|&j| layout.weight[j]).sum();
        for &j in idx {
            x[j] = problem.totals[i] / wsum;
        }
    }
    x
}

/// Snap sub-threshold slots to zero and restore exact conservation.
fn snap(x: &mut [f64], layout: &Layout, totals: [f64; 3]) {
    for i in 0..3 {
        let idx = &layout.by_type[i];
        if idx.is_empty() {
            continue;
        }
        let floor = 1e-12 * totals[i].max(1e-300);
        for &j in idx {
            if x[j] < floor {
                x[j] = 0.0;
            }
        }
        let sum: f64 = idx.iter().map(|&j| layout.weight[j] * x[j]).sum();
        if sum > 0.0 {
            let largest = *idx
                .iter()
                .max_by(|&&a, &&b| x[a].partial_cmp(&x[b]).unwrap())
                .unwrap();
            x[largest] += (totals[i] - sum) / layout.weight[largest];
        }
    }
}

/// Projected gradient with backtracking, followed by an active-set Newton
/// polish of the KKT system (skipped entirely in screening mode).
fn solve_from(
    ev: &mut Evaluator,
    mut x: Vec<f64>,
    max_pg_iters: usize,
    polish_iters: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = x.len();
    let totals = ev.problem.totals;
    let mscale = totals.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    let mut f = ev.energy(&x);
    if !f.is_finite() {
        return Err(Error::numeric("inner start infeasible", f64::INFINITY));
    }
    let mut g = vec![0.0; n];
    let mut alpha = 0.05 * mscale;
    let mut stall = 0usize;
    for _ in 0..max_pg_iters {
        ev.gradient(&x, &mut g)?;
        let gnorm = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-30);
        let mut accepted = false;
        for _ in 0..40 {
            let mut xn = x.clone();
            for j in 0..n {
                xn[j] -= alpha * g[j] / gnorm * 1.0;
            }
            for i in 0..3 {
                let idx: Vec<usize> = ev.layout.by_type[i].clone();
                project_weighted_simplex(&mut xn, &ev.layout.weight, &idx, totals[i]);
            }
            let fn_ = ev.energy(&xn);
            if fn_ < f - 1e-14 * f.abs().max(1.0) {
                let delta = f - fn_;
                x = xn;
                f = fn_;
                alpha = (alpha * 1.3).min(10.0 * mscale);
                accepted = true;
                if delta < 1e-12 * f.abs().max(1.0) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-14 * mscale {
                break;
            }
        }
        if !accepted || stall >= 4 {
            break;
        }
    }
    snap(&mut x, &ev.layout, totals);
    if polish_iters > 0 {
        newton_polish(ev, &mut x, polish_iters)?;
        snap(&mut x, &ev.layout, totals);
    }
    let f = ev.energy(&x);
    Ok((x, f))
}

/// Newton iteration on the stationarity system of the active slots:
/// gradients equal the per-type multiplier, per-type masses conserved.
fn newton_polish(ev: &mut Evaluator, x: &mut [f64], max_iters: usize) -> Result<()> {
    let totals = ev.problem.totals;
    let mscale = totals.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    for _ in 0..max_iters {
        let act_eps = 1e-10 * mscale;
        let active: Vec<usize> = (0..x.len()).filter(|&j| x[j] > act_eps).collect();
        if active.is_empty() {
            return Ok(());
        }
        let types_present: Vec<usize> = (0..3)
            .filter(|&i| active.iter().any(|&j| ev.layout.slots[j].2 == i))
            .collect();
        let na = active.len();
        let nt = types_present.len();
        let mut g = vec![0.0; x.len()];
        ev.gradient(x, &mut g)?;
        // Multiplier guess: weighted mean of active gradients per type.
        let mut lambda = vec![0.0; nt];
        for (ti, &i) in types_present.iter().enumerate() {
            let mut s = 0.0;
            let mut wsum = 0.0;
            for &j in &active {
                if ev.layout.slots[j].2 == i {
                    s += ev.layout.weight[j] * g[j];
                    wsum += ev.layout.weight[j];
                }
            }
            lambda[ti] = s / wsum;
        }
        // Residuals.
        let mut res = vec![0.0; na + nt];
        let mut rmax = 0.0f64;
        for (aj, &j) in active.iter().enumerate() {
            let ti = types_present
                .iter()
                .position(|&i| i == ev.layout.slots[j].2)
                .unwrap();
            res[aj] = g[j] - lambda[ti];
            rmax = rmax.max(res[aj].abs());
        }
        for (ti, &i) in types_present.iter().enumerate() {
            let sum: f64 = ev.layout.by_type[i]
                .iter()
                .map(|&j| ev.layout.weight[j] * x[j])
                .sum();
            res[na + ti] = sum - totals[i];
            rmax = rmax.max(res[na + ti].abs() / mscale);
        }
        if rmax < 1e-11 {
            return Ok(());
        }
        // Hessian blocks per class by finite differences of the gradient.
        let mut h = Mat::zeros(na + nt, na + nt);
        let classes = ev.problem.classes.len();
        for c in 0..classes {
            let slots: Vec<usize> = (ev.layout.class_start[c]..ev.layout.class_start[c + 1])
                .filter(|s| active.contains(s))
                .collect();
            if slots.is_empty() {
                continue;
            }
            for &sj in &slots {
                let hstep = 1e-6 * x[sj].max(1e-3 * mscale);
                let mut xp = x.to_vec();
                xp[sj] += hstep;
                let mut gp = vec![0.0; x.len()];
                ev.gradient(&xp, &mut gp)?;
                for &sk in &slots {
                    let aj = active.iter().position(|&j| j == sj).unwrap();
                    let ak = active.iter().position(|&j| j == sk).unwrap();
                    let v = (gp[sk] - g[sk]) / hstep;
                    // Accumulate symmetrized entries.
                    let cur = h.at(ak, aj);
                    h.set(ak, aj, cur + 0.5 * v);
                    let cur = h.at(aj, ak);
                    h.set(aj, ak, cur + 0.5 * v);
                }
            }
        }
        for (aj, &j) in active.iter().enumerate() {
            let ti = types_present
                .iter()
                .position(|&i| i == ev.layout.slots[j].2)
                .unwrap();
            h.set(aj, na + ti, -1.0);
            h.set(na + ti, aj, ev.layout.weight[j]);
        }
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let Some(step) = solve(h, rhs) else {
            return Ok(()); // singular KKT system: keep the PG point
        };
        // Fraction-to-boundary damping.
        let mut t = 1.0f64;
        for (aj, &j) in active.iter().enumerate() {
            if step[aj] < 0.0 {
                t = t.min(-0.995 * x[j] / step[aj]).max(0.0);
            }
        }
        let mut xn = x.to_vec();
        for (aj, &j) in active.iter().enumerate() {
            xn[j] = (x[j] + t * step[aj]).max(0.0);
        }
        let f_old = ev.energy(x);
        let f_new = ev.energy(&xn);
        if !f_new.is_finite() || f_new > f_old + 1e-9 * f_old.abs().max(1.0) {
            // Step made things worse beyond tolerance: halve once, then stop.
            let mut xh = x.to_vec();
            for (aj, &j) in active.iter().enumerate() {
                xh[j] = (x[j] + 0.5 * t * step[aj]).max(0.0);
            }
            if ev.energy(&xh).is_finite() {
                x.copy_from_slice(&xh);
                continue;
            }
            return Ok(());
        }
        x.copy_from_slice(&xn);
    }
    Ok(())
}

/// Per-type multiplier spread of a solved point.
fn spreads(
    ev: &mut Evaluator,
    x: &[f64],
) -> Result<([Option<f64>; 3], [f64; 3])> {
    let mscale = ev
        .problem
        .totals
        .iter()
        .cloned()
        .fold(f64::MIN_POSITIVE, f64::max);
    let act_eps = 1e-10 * mscale;
    let mut g = vec![0.0; x.len()];
    ev.gradient(x, &mut g)?;
    let mut mult = [None; 3];
    let mut spread = [0.0; 3];
    for i in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut w = 0.0;
        for &j in &ev.layout.by_type[i] {
            if x[j] > act_eps {
                lo = lo.min(g[j]);
                hi = hi.max(g[j]);
                sum += ev.layout.weight[j] * g[j];
                w += ev.layout.weight[j];
            }
        }
        if w > 0.0 {
            mult[i] = Some(sum / w);
            spread[i] = hi - lo;
        }
    }
    Ok((mult, spread))
}

/// Solve effort: screening ranks signatures cheaply, full certifies KKT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Effort {
    Screen,
    Full,
}

/// Optimize the class problem with `starts` deterministic multi-starts.
pub(crate) fn optimize_classes(
    problem: &ClassProblem,
    gamma: &GammaMatrix,
    seed: u64,
    starts: usize,
    effort: Effort,
    cache: &mut TripleCache,
) -> Result<InnerResult> {
    let layout = Layout::new(problem);
    for i in 0..3 {
        if problem.totals[i] > 0.0 && layout.by_type[i].is_empty() {
            return Err(Error::domain(format!(
                "signature infeasible: no lobe slot for type {} mass",
                i + 1
            )));
        }
    }
    let base = equal_split_start(problem, &layout);
    let (max_pg, polish) = match effort {
        Effort::Screen => (40, 0),
        Effort::Full => (300, 40),
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for start_idx in 0..starts.max(1) {
        let mut x0 = base.clone();
        if start_idx > 0 {
            for v in x0.iter_mut() {
                *v *= 0.25 + 1.5 * rng.gen::<f64>();
            }
            for i in 0..3 {
                let idx = layout.by_type[i].clone();
                project_weighted_simplex(&mut x0, &layout.weight, &idx, problem.totals[i]);
            }
        }
        let mut ev = Evaluator {
            problem,
            layout: Layout::new(problem),
            gamma,
            cache,
        };
        match solve_from(&mut ev, x0, max_pg, polish) {
            Ok((x, f)) => {
                if best.as_ref().map_or(true, |(_, bf)| f < *bf) {
                    best = Some((x, f));
                }
            }
            Err(_) => continue,
        }
    }
    let (x, energy) = best.ok_or_else(|| {
        Error::numeric("all inner starts failed to produce a feasible point", f64::INFINITY)
    })?;
    if effort == Effort::Screen {
        return Ok(InnerResult {
            x,
            energy,
            multipliers: [None; 3],
            kkt_spread: [f64::NAN; 3],
            converged: false,
        });
    }
    let mut ev = Evaluator {
        problem,
        layout: Layout::new(problem),
        gamma,
        cache,
    };
    let (multipliers, kkt_spread) = spreads(&mut ev, &x)?;
    let converged = kkt_spread.iter().all(|&s| s < 1e-6);
    Ok(InnerResult {
        x,
        energy,
        multipliers,
        kkt_spread,
        converged,
    })
}

/// Expand a class-space solution into one bubble per class instance,
/// dropping empty bubbles.
pub(crate) fn to_bubbles(problem: &ClassProblem, x: &[f64]) -> Vec<MassTriple> {
    let layout = Layout::new(problem);
    let mut bubbles = Vec::new();
    for (c, class) in problem.classes.iter().enumerate() {
        let m = layout.class_masses(problem, x, c);
        if m.iter().any(|&v| v > 0.0) {
            let mt = MassTriple::new(m).expect("nonnegative class masses");
            for _ in 0..class.count {
                bubbles.push(mt);
            }
        }
    }
    bubbles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_unit_weights() {
        let mut y = vec![0.8, 0.4, -0.2];
        let idx = [0usize, 1, 2];
        project_weighted_simplex(&mut y, &[1.0, 1.0, 1.0], &idx, 1.0);
        let sum: f64 = y.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        assert!(y.iter().all(|&v| v >= 0.0));
        assert!(y[2] == 0.0);
    }

    #[test]
    fn projection_weighted() {
        let mut y = vec![1.0, 1.0];
        let idx = [0usize, 1];
        project_weighted_simplex(&mut y, &[2.0, 1.0], &idx, 2.0);
        assert!((2.0 * y[0] + y[1] - 2.0).abs() < 1e-14);
        assert!(y.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn equal_singles_split_evenly() {
        // 5 identical type-1 singles, M = 40: each gets 8.
        let problem = ClassProblem {
            classes: vec![ClassSpec {
                types: vec![0],
                count: 5,
            }],
            totals: [40.0, 0.0, 0.0],
        };
        let gamma = GammaMatrix::identity();
        let mut cache = TripleCache::new();
        let r = optimize_classes(&problem, &gamma, 7, 3, Effort::Full, &mut cache).unwrap();
        assert!((r.x[0] - 8.0).abs() < 1e-8, "got {}", r.x[0]);
        let expect = 2.0 * (40.0 * std::f64::consts::PI * 5.0).sqrt()
            + 1600.0 / (4.0 * std::f64::consts::PI * 5.0);
        assert!((r.energy - expect).abs() < 1e-8);
        assert!(r.kkt_spread[0] < 1e-8);
    }

    #[test]
    fn fully_constrained_triple() {
        let problem = ClassProblem {
            classes: vec![ClassSpec {
                types: vec![0, 1, 2],
                count: 1,
            }],
            totals: [1.0, 1.0, 1.0],
        };
        let gamma = GammaMatrix::identity();
        let mut cache = TripleCache::new();
        let r = optimize_classes(&problem, &gamma, 7, 1, Effort::Full, &mut cache).unwrap();
        for j in 0..3 {
            assert!((r.x[j] - 1.0).abs() < 1e-12);
        }
        // lambda_i = Gamma row sum/(2 pi) + 1/r_i.
        let geo = crate::geometry::solve_cluster(&MassTriple::new([1.0, 1.0, 1.0]).unwrap())
            .unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI) + geo.outer_curvature(0).unwrap();
        assert!((r.multipliers[0].unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn two_triples_equal_split() {
        let problem = ClassProblem {
            classes: vec![ClassSpec {
                types: vec![0, 1, 2],
                count: 2,
            }],
            totals: [2.0, 2.0, 2.0],
        };
        let gamma = GammaMatrix::identity();
        let mut cache = TripleCache::new();
        let r = optimize_classes(&problem, &gamma, 7, 4, Effort::Full, &mut cache).unwrap();
        let e_one = e0_cached(
            &mut cache,
            &MassTriple::new([1.0, 1.0, 1.0]).unwrap(),
            &gamma,
        )
        .unwrap();
        assert!((r.energy - 2.0 * e_one).abs() < 1e-8);
        assert!(r.kkt_spread.iter().all(|&s| s < 1e-6));
    }
}
