//! Pareto dominance, non-domination fronts, crowding, and slot-local ranks.
//!
//! Objective 1 (merit) is maximized, objective 2 (subset cardinality) is
//! minimized. ENORA ranks an individual by its non-domination level inside
//! its slot; NSGA-II ranks by the non-domination level in the whole
//! population. With a single slot the two coincide.

use serde::{Deserialize, Serialize};

use super::Individual;

/// The two wrapper-selection objectives of one individual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// Evaluator score in [0,1]; higher is better.
    pub merit: f64,
    /// Number of selected attributes; lower is better.
    pub cardinality: usize,
}

/// True iff `a` is no worse than `b` on both objectives and strictly better
/// on at least one.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a.merit >= b.merit
        && a.cardinality <= b.cardinality
        && (a.merit > b.merit || a.cardinality < b.cardinality)
}

/// Deb's fast non-dominated sort. Front 0 holds the globally non-dominated
/// members; front t holds what becomes non-dominated once fronts < t are
/// removed. Every index appears in exactly one front.
pub fn fast_nondominated_sort(pop: &[Objectives]) -> Vec<Vec<usize>> {
    let n = pop.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    let mut fronts: Vec<Vec<usize>> = vec![Vec::new()];

    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            if dominates(&pop[p], &pop[q]) {
                dominated_by[p].push(q);
            } else if dominates(&pop[q], &pop[p]) {
                domination_count[p] += 1;
            }
        }
        if domination_count[p] == 0 {
            fronts[0].push(p);
        }
    }

    let mut t = 0;
    while !fronts[t].is_empty() {
        let mut next = Vec::new();
        for &p in &fronts[t] {
            for &q in &dominated_by[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        t += 1;
        fronts.push(next);
    }
    fronts.pop(); // drop the trailing empty front
    for front in &mut fronts {
        front.sort_unstable(); // membership order carries no meaning; keep it stable
    }
    fronts
}

/// Crowding distance of each front member, in input order.
///
/// Per objective the front is sorted, boundary members get infinity, and
/// interior members accumulate `(next − prev) / (max − min)`. Objectives
/// whose values coincide across the whole front are skipped.
pub fn crowding_distance(front: &[Objectives]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0f64; n];
    if n == 0 {
        return dist;
    }

    // objective extractors: merit, then cardinality
    let axes: [fn(&Objectives) -> f64; 2] = [|o| o.merit, |o| o.cardinality as f64];
    for axis in axes {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            axis(&front[a])
                .partial_cmp(&axis(&front[b]))
                .expect("objectives are finite")
                .then(a.cmp(&b))
        });
        let lo = axis(&front[order[0]]);
        let hi = axis(&front[order[n - 1]]);
        if hi <= lo {
            continue; // degenerate axis carries no spacing information
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for k in 1..n - 1 {
            let prev = axis(&front[order[k - 1]]);
            let next = axis(&front[order[k + 1]]);
            dist[order[k]] += (next - prev) / (hi - lo);
        }
    }
    dist
}

/// Slot of an individual with the given subset cardinality: slots partition
/// the cardinality range [1, n] into `s` nearly equal bands.
pub fn slot_of(cardinality: usize, n_attributes: usize, s: usize) -> usize {
    debug_assert!(cardinality >= 1 && cardinality <= n_attributes && s >= 1);
    ((cardinality - 1) * s / n_attributes).min(s - 1)
}

/// ENORA ranking: each member's rank is its non-domination level within its
/// slot, and crowding is computed within the member's slot-front. Returns
/// `(rank, crowding)` per member, in input order.
pub fn enora_rank(pop: &[Individual], n_attributes: usize, s: usize) -> Vec<(usize, f64)> {
    let objectives: Vec<Objectives> = pop.iter().map(|ind| ind.objectives()).collect();
    let mut out = vec![(0usize, 0.0f64); pop.len()];

    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); s];
    for (i, o) in objectives.iter().enumerate() {
        slots[slot_of(o.cardinality, n_attributes, s)].push(i);
    }

    for members in slots.iter().filter(|m| !m.is_empty()) {
        let local: Vec<Objectives> = members.iter().map(|&i| objectives[i]).collect();
        for (front_idx, front) in fast_nondominated_sort(&local).iter().enumerate() {
            let front_objs: Vec<Objectives> = front.iter().map(|&k| local[k]).collect();
            let crowd = crowding_distance(&front_objs);
            for (pos, &k) in front.iter().enumerate() {
                out[members[k]] = (front_idx, crowd[pos]);
            }
        }
    }
    out
}

/// NSGA-II ranking over the whole population; same output shape as
/// [`enora_rank`].
pub fn nsga2_rank(pop: &[Individual]) -> Vec<(usize, f64)> {
    let objectives: Vec<Objectives> = pop.iter().map(|ind| ind.objectives()).collect();
    let mut out = vec![(0usize, 0.0f64); pop.len()];
    for (front_idx, front) in fast_nondominated_sort(&objectives).iter().enumerate() {
        let front_objs: Vec<Objectives> = front.iter().map(|&i| objectives[i]).collect();
        let crowd = crowding_distance(&front_objs);
        for (pos, &i) in front.iter().enumerate() {
            out[i] = (front_idx, crowd[pos]);
        }
    }
    out
}

/// Tournament/survival preference: lower rank wins; equal ranks prefer the
/// larger crowding distance. Equal on both → neither is better.
pub fn better(x: &Individual, y: &Individual) -> bool {
    x.rank < y.rank || (x.rank == y.rank && x.crowding > y.crowding)
}
