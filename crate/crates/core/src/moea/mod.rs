//! Multi-objective evolutionary wrapper feature selection.
//!
//! A population of binary attribute masks evolves under μ+λ survival:
//! every generation N children are produced by binary tournament,
//! self-adaptive uniform crossover, and self-adaptive single-bit-flip
//! mutation; parents and children are pooled and the N best under
//! (rank, crowding) survive. Two ranking strategies are available:
//!
//! * `Enora` — rank is the non-domination level within the individual's
//!   slot (slots partition subset cardinality, preserving a spread of
//!   subset sizes).
//! * `Nsga2` — rank is the non-domination level in the whole population.
//!
//! The run is a pure function of `(train, config)`: a fixed seed gives a
//! bit-identical [`ParetoResult`], whether children are evaluated serially
//! or in parallel.

mod evaluate;
mod operators;
mod rank;

pub use evaluate::{evaluate_mask_direct, ClassifierKind, EvaluatorConfig, FitnessEvaluator};
pub use operators::{binary_tournament, crossover_self_adaptive, mutate_self_adaptive};
pub use rank::{
    better, crowding_distance, dominates, enora_rank, fast_nondominated_sort, nsga2_rank,
    slot_of, Objectives,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::seeding;

const SALT_EVOLUTION: u64 = 0x45564f4c;

/// Ranking strategy selecting between slot-local and global non-domination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankingStrategy {
    Enora,
    Nsga2,
}

impl std::fmt::Display for RankingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankingStrategy::Enora => f.write_str("enora"),
            RankingStrategy::Nsga2 => f.write_str("nsga2"),
        }
    }
}

/// One member of the population: a mask, its self-adaptive operator rates,
/// cached objectives, and the rank/crowding assigned by the active strategy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub mask: FeatureMask,
    /// Crossover rate in [0,1].
    pub pc: f64,
    /// Mutation rate in [0,1].
    pub pm: f64,
    objectives: Option<Objectives>,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn new(mask: FeatureMask, pc: f64, pm: f64) -> Self {
        Individual {
            mask,
            pc: pc.clamp(0.0, 1.0),
            pm: pm.clamp(0.0, 1.0),
            objectives: None,
            rank: 0,
            crowding: 0.0,
        }
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    /// Panics when unevaluated; ranking requires evaluated populations.
    pub fn objectives(&self) -> Objectives {
        self.objectives.expect("individual has not been evaluated")
    }

    pub fn set_objectives(&mut self, objectives: Objectives) {
        self.objectives = Some(objectives);
    }

    pub fn clear_objectives(&mut self) {
        self.objectives = None;
    }
}

/// Evolution parameters. `slots` is only meaningful for the ENORA strategy;
/// `None` resolves to `min(10, n_attributes)` at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoeaConfig {
    /// Population size N (positive and even).
    pub population_size: usize,
    /// Generations G.
    pub generations: usize,
    pub ranking: RankingStrategy,
    pub slots: Option<usize>,
    pub evaluator: EvaluatorConfig,
    pub seed: u64,
}

impl MoeaConfig {
    pub fn new(ranking: RankingStrategy, seed: u64) -> Self {
        MoeaConfig {
            population_size: 50,
            generations: 50,
            ranking,
            slots: None,
            evaluator: EvaluatorConfig::default(),
            seed,
        }
    }

    fn validate(&self, n_attributes: usize) -> Result<usize> {
        if n_attributes < 1 {
            return Err(Error::Argument("need at least one attribute".into()));
        }
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "population size must be a positive even integer, got {}",
                self.population_size
            )));
        }
        if self.generations < 1 {
            return Err(Error::Argument("generation count must be positive".into()));
        }
        self.evaluator.validate()?;
        let slots = self.slots.unwrap_or_else(|| n_attributes.min(10));
        if slots < 1 || slots > self.population_size {
            return Err(Error::Argument(format!(
                "slot count {slots} must be in [1, population size]"
            )));
        }
        Ok(slots)
    }
}

/// Best merit and mean cardinality of the population at one generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub generation: usize,
    pub best_merit: f64,
    pub mean_cardinality: f64,
}

/// Outcome of one evolutionary run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoResult {
    pub final_population: Vec<Individual>,
    /// Globally non-dominated members of the final population.
    pub nondominated: Vec<Individual>,
    /// The mask picked by the final-output rule.
    pub selected: FeatureMask,
    pub trace: Vec<TracePoint>,
    /// Distinct-mask fitness evaluations performed (≤ N·(G+1)).
    pub evaluations: u64,
}

/// Assigns rank and crowding to every member under the active strategy.
pub fn assign_ranks(
    pop: &mut [Individual],
    strategy: RankingStrategy,
    n_attributes: usize,
    slots: usize,
) {
    let assigned = match strategy {
        RankingStrategy::Enora => enora_rank(pop, n_attributes, slots),
        RankingStrategy::Nsga2 => nsga2_rank(pop),
    };
    for (ind, (rank, crowding)) in pop.iter_mut().zip(assigned) {
        ind.rank = rank;
        ind.crowding = crowding;
    }
}

/// Runs the evolutionary search over `train` (which must be discretized).
pub fn run_moea(train: &Dataset, cfg: &MoeaConfig) -> Result<ParetoResult> {
    let n = train.n_attributes();
    let slots = cfg.validate(n)?;
    if !train.all_nominal() {
        return Err(Error::Schema(
            "training data must be discretized before selection".into(),
        ));
    }

    let evaluator = FitnessEvaluator::new(train, &cfg.evaluator, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(cfg.seed, SALT_EVOLUTION));
    let n_pop = cfg.population_size;

    // Uniform random initialization: each bit set with probability one half,
    // empty masks repaired, rates uniform in [0,1].
    let mut population: Vec<Individual> = (0..n_pop)
        .map(|_| {
            let mut bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            if bits.iter().all(|b| !b) {
                let k = rng.gen_range(0..n);
                bits[k] = true;
            }
            let mask = FeatureMask::from_bits(bits).expect("repaired mask");
            let pc: f64 = rng.gen();
            let pm: f64 = rng.gen();
            Individual::new(mask, pc, pm)
        })
        .collect();

    evaluate_population(&evaluator, &mut population)?;
    assign_ranks(&mut population, cfg.ranking, n, slots);

    let mut trace = Vec::with_capacity(cfg.generations + 1);
    trace.push(trace_point(0, &population));

    for generation in 1..=cfg.generations {
        let mut children = Vec::with_capacity(n_pop);
        while children.len() < n_pop {
            let p1 = binary_tournament(&population, &mut rng).clone();
            let p2 = binary_tournament(&population, &mut rng).clone();
            let (c1, c2) = crossover_self_adaptive(&p1, &p2, &mut rng);
            children.push(mutate_self_adaptive(&c1, &mut rng));
            children.push(mutate_self_adaptive(&c2, &mut rng));
        }
        evaluate_population(&evaluator, &mut children)?;

        // μ+λ: pool parents and children, rank, keep the N best.
        let mut pool = population;
        pool.append(&mut children);
        assign_ranks(&mut pool, cfg.ranking, n, slots);
        population = survive(pool, n_pop);

        trace.push(trace_point(generation, &population));
    }

    // Re-rank the survivors in their own context so the reported ranks are
    // self-consistent, then read off the global Pareto set.
    assign_ranks(&mut population, cfg.ranking, n, slots);
    let nondominated = global_nondominated(&population);
    let selected = pick_final(&nondominated)?;

    Ok(ParetoResult {
        final_population: population,
        nondominated,
        selected,
        trace,
        evaluations: evaluator.fitness_calls(),
    })
}

/// The final-output rule: among the non-dominated set, maximal merit, then
/// minimal cardinality, then the lexicographically smallest mask.
pub fn select_final(result: &ParetoResult) -> Result<FeatureMask> {
    pick_final(&result.nondominated)
}

fn pick_final(nondominated: &[Individual]) -> Result<FeatureMask> {
    nondominated
        .iter()
        .max_by(|a, b| {
            let (oa, ob) = (a.objectives(), b.objectives());
            oa.merit
                .partial_cmp(&ob.merit)
                .expect("finite merit")
                .then(ob.cardinality.cmp(&oa.cardinality))
                .then(b.mask.cmp(&a.mask))
        })
        .map(|ind| ind.mask.clone())
        .ok_or_else(|| Error::Argument("non-dominated set is empty".into()))
}

/// Evaluates every unevaluated member. Distinct pending masks are evaluated
/// in parallel; each mask's value is a pure function of the run seed, so the
/// schedule cannot change results or the fitness-call count.
fn evaluate_population(evaluator: &FitnessEvaluator, pop: &mut [Individual]) -> Result<()> {
    let mut pending: Vec<FeatureMask> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for ind in pop.iter() {
        if !ind.is_evaluated() && seen.insert(ind.mask.bits().to_vec()) {
            pending.push(ind.mask.clone());
        }
    }
    pending
        .par_iter()
        .map(|mask| evaluator.evaluate(mask).map(|_| ()))
        .collect::<Result<Vec<()>>>()?;
    for ind in pop.iter_mut() {
        if !ind.is_evaluated() {
            ind.set_objectives(evaluator.evaluate(&ind.mask)?);
        }
    }
    Ok(())
}

/// Keeps the `n` best members of the ranked pool: sort by rank, break ties
/// by larger crowding, then by pool position for determinism.
fn survive(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        pool[a]
            .rank
            .cmp(&pool[b].rank)
            .then(
                pool[b]
                    .crowding
                    .partial_cmp(&pool[a].crowding)
                    .expect("crowding is never NaN"),
            )
            .then(a.cmp(&b))
    });
    order.truncate(n);
    order.sort_unstable();
    let mut keep = order.into_iter().peekable();
    pool.into_iter()
        .enumerate()
        .filter_map(|(i, ind)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(ind)
            } else {
                None
            }
        })
        .collect()
}

fn global_nondominated(pop: &[Individual]) -> Vec<Individual> {
    pop.iter()
        .filter(|a| {
            !pop.iter()
                .any(|b| dominates(&b.objectives(), &a.objectives()))
        })
        .cloned()
        .collect()
}

fn trace_point(generation: usize, pop: &[Individual]) -> TracePoint {
    let best_merit = pop
        .iter()
        .map(|i| i.objectives().merit)
        .fold(f64::NEG_INFINITY, f64::max);
    let mean_cardinality = pop
        .iter()
        .map(|i| i.objectives().cardinality as f64)
        .sum::<f64>()
        / pop.len() as f64;
    TracePoint {
        generation,
        best_merit,
        mean_cardinality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell};

    fn small_train(seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attrs: Vec<AttributeSpec> = (0..4)
            .map(|a| AttributeSpec::nominal(format!("a{a}"), vec!["0".into(), "1".into()]))
            .collect();
        let class = AttributeSpec::nominal("y", vec!["p".into(), "n".into()]);
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for _ in 0..60 {
            let y: u32 = rng.gen_range(0..2);
            rows.push(
                (0..4)
                    .map(|a| {
                        if a == 0 {
                            Cell::Idx(if rng.gen_bool(0.9) { y } else { 1 - y })
                        } else {
                            Cell::Idx(rng.gen_range(0..2))
                        }
                    })
                    .collect(),
            );
            classes.push(y);
        }
        Dataset::new(attrs, class, rows, classes).unwrap()
    }

    fn quick_config(ranking: RankingStrategy, seed: u64) -> MoeaConfig {
        MoeaConfig {
            population_size: 12,
            generations: 6,
            ranking,
            slots: Some(3),
            evaluator: EvaluatorConfig {
                inner_folds: 3,
                ..EvaluatorConfig::default()
            },
            seed,
        }
    }

    #[test]
    fn population_size_is_maintained_and_budget_respected() {
        let ds = small_train(1);
        let cfg = quick_config(RankingStrategy::Enora, 42);
        let result = run_moea(&ds, &cfg).unwrap();
        assert_eq!(result.final_population.len(), 12);
        assert_eq!(result.trace.len(), 7);
        assert!(result.evaluations <= 12 * 7);
        assert!(result.evaluations > 0);
    }

    #[test]
    fn nondominated_set_has_no_dominated_pair() {
        let ds = small_train(2);
        let result = run_moea(&ds, &quick_config(RankingStrategy::Nsga2, 7)).unwrap();
        for a in &result.nondominated {
            for b in &result.nondominated {
                assert!(!dominates(&a.objectives(), &b.objectives()));
            }
        }
        assert!(result
            .nondominated
            .iter()
            .any(|ind| ind.mask == result.selected));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let ds = small_train(3);
        let cfg = quick_config(RankingStrategy::Enora, 99);
        let a = run_moea(&ds, &cfg).unwrap();
        let b = run_moea(&ds, &cfg).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.trace, b.trace);
        let masks_a: Vec<String> = a.final_population.iter().map(|i| i.mask.to_bitstring()).collect();
        let masks_b: Vec<String> = b.final_population.iter().map(|i| i.mask.to_bitstring()).collect();
        assert_eq!(masks_a, masks_b);
    }

    #[test]
    fn elitism_never_loses_best_merit() {
        let ds = small_train(4);
        for seed in [1u64, 5, 9] {
            let result = run_moea(&ds, &quick_config(RankingStrategy::Enora, seed)).unwrap();
            let first = result.trace.first().unwrap().best_merit;
            let last = result.trace.last().unwrap().best_merit;
            assert!(
                last >= first - 1e-12,
                "final best merit {last} dropped below initial {first}"
            );
        }
    }

    #[test]
    fn final_selection_rule_spec_example() {
        // {(0.9,3), (0.9,2), (0.8,1)} → the (0.9,2) mask
        let mk = |merit: f64, bits: &str| {
            let mask = FeatureMask::from_bitstring(bits).unwrap();
            let mut ind = Individual::new(mask, 0.5, 0.5);
            ind.set_objectives(Objectives {
                merit,
                cardinality: ind.mask.cardinality(),
            });
            ind
        };
        let front = vec![mk(0.9, "111"), mk(0.9, "110"), mk(0.8, "100")];
        assert_eq!(pick_final(&front).unwrap().to_bitstring(), "110");

        // singleton front
        let single = vec![mk(0.7, "010")];
        assert_eq!(pick_final(&single).unwrap().to_bitstring(), "010");

        // exact tie on both objectives → lexicographically smallest mask
        let tie = vec![mk(0.9, "101"), mk(0.9, "011")];
        assert_eq!(pick_final(&tie).unwrap().to_bitstring(), "011");
    }

    #[test]
    fn odd_population_size_rejected() {
        let ds = small_train(5);
        let mut cfg = quick_config(RankingStrategy::Enora, 1);
        cfg.population_size = 13;
        assert!(run_moea(&ds, &cfg).is_err());
    }

    #[test]
    fn survivors_are_never_bettered_by_discards() {
        let ds = small_train(6);
        let cfg = quick_config(RankingStrategy::Nsga2, 3);
        let evaluator = FitnessEvaluator::new(&ds, &cfg.evaluator, cfg.seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut pool: Vec<Individual> = (0..20)
            .map(|_| {
                let mut bits: Vec<bool> = (0..4).map(|_| rng.gen_bool(0.6)).collect();
                if bits.iter().all(|b| !b) {
                    bits[0] = true;
                }
                Individual::new(FeatureMask::from_bits(bits).unwrap(), 0.5, 0.5)
            })
            .collect();
        evaluate_population(&evaluator, &mut pool).unwrap();
        assign_ranks(&mut pool, RankingStrategy::Nsga2, 4, 1);

        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| {
            pool[a]
                .rank
                .cmp(&pool[b].rank)
                .then(pool[b].crowding.partial_cmp(&pool[a].crowding).unwrap())
                .then(a.cmp(&b))
        });
        let kept: Vec<&Individual> = order[..10].iter().map(|&i| &pool[i]).collect();
        let discarded: Vec<&Individual> = order[10..].iter().map(|&i| &pool[i]).collect();
        for d in &discarded {
            for k in &kept {
                assert!(!better(d, k), "a discarded member out-ranked a survivor");
            }
        }
    }
}
