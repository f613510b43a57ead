//! Stratified cross-validation folds and stratified subsampling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeding;

/// Assignment of every instance to one of `k` folds.
///
/// Construction guarantees that fold sizes differ by at most one and that
/// per-class counts across folds differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_of(&self, instance: usize) -> usize {
        self.assignments[instance]
    }

    /// Instance indices held out by `fold`.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    /// Instance indices available for training when `fold` is held out.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f != fold).then_some(i))
            .collect()
    }
}

/// Builds a stratified `k`-fold plan: instances are shuffled within each
/// class using a seed-derived stream, concatenated class by class, and dealt
/// round-robin. Dealing position `t` goes to fold `t mod k`, which makes
/// both balance invariants immediate.
pub fn stratified_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Argument(format!("fold count must be at least 2, got {k}")));
    }
    if k > dataset.n_instances() {
        return Err(Error::Argument(format!(
            "fold count {k} exceeds instance count {}",
            dataset.n_instances()
        )));
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.n_classes()];
    for i in 0..dataset.n_instances() {
        by_class[dataset.class_of(i) as usize].push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0x666f_6c64)); // "fold"
    let mut assignments = vec![0usize; dataset.n_instances()];
    let mut t = 0usize;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignments[i] = t % k;
            t += 1;
        }
    }

    Ok(FoldPlan { k, assignments })
}

/// Deterministic stratified subsample of at most `cap` instances. Returns
/// the dataset unchanged when it is already within the cap. Class quotas are
/// proportional with largest-remainder rounding; every non-empty class keeps
/// at least one instance while the cap allows it.
pub fn stratified_subsample(dataset: &Dataset, cap: usize, seed: u64) -> Result<Dataset> {
    if cap == 0 {
        return Err(Error::Argument("subsample cap must be positive".into()));
    }
    let n = dataset.n_instances();
    if n <= cap {
        return Ok(dataset.clone());
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.n_classes()];
    for i in 0..n {
        by_class[dataset.class_of(i) as usize].push(i);
    }

    // Largest-remainder apportionment of the cap across classes.
    let mut quotas: Vec<usize> = Vec::with_capacity(by_class.len());
    let mut remainders: Vec<(usize, f64)> = Vec::new();
    let mut assigned = 0usize;
    for (c, members) in by_class.iter().enumerate() {
        let exact = members.len() as f64 * cap as f64 / n as f64;
        let base = exact.floor() as usize;
        quotas.push(base.min(members.len()));
        assigned += quotas[c];
        remainders.push((c, exact - base as f64));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut i = 0;
    while assigned < cap && i < remainders.len() {
        let c = remainders[i].0;
        if quotas[c] < by_class[c].len() {
            quotas[c] += 1;
            assigned += 1;
        }
        i += 1;
    }
    // Keep minority classes represented when possible.
    loop {
        let Some(starved) = (0..quotas.len()).find(|&c| quotas[c] == 0 && !by_class[c].is_empty())
        else {
            break;
        };
        let Some(donor) = (0..quotas.len()).max_by_key(|&c| quotas[c]).filter(|&c| quotas[c] > 1)
        else {
            break;
        };
        quotas[donor] -= 1;
        quotas[starved] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0x7375_6273)); // "subs"
    let mut keep: Vec<usize> = Vec::with_capacity(cap);
    for (c, members) in by_class.iter().enumerate() {
        let mut pool = members.clone();
        pool.shuffle(&mut rng);
        keep.extend(pool.into_iter().take(quotas[c]));
    }
    keep.sort_unstable();
    dataset.subset_rows(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell};

    fn dataset_with_classes(counts: &[usize]) -> Dataset {
        let attrs = vec![AttributeSpec::nominal("a", vec!["x".into(), "y".into()])];
        let labels = (0..counts.len().max(2)).map(|c| format!("c{c}")).collect();
        let class = AttributeSpec::nominal("class", labels);
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            for i in 0..n {
                rows.push(vec![Cell::Idx((i % 2) as u32)]);
                classes.push(c as u32);
            }
        }
        Dataset::new(attrs, class, rows, classes).unwrap()
    }

    #[test]
    fn balanced_classes_spread_one_per_fold() {
        let ds = dataset_with_classes(&[5, 5]);
        let plan = stratified_folds(&ds, 5, 3).unwrap();
        for fold in 0..5 {
            let test = plan.test_indices(fold);
            assert_eq!(test.len(), 2);
            let per_class: Vec<usize> = (0..2)
                .map(|c| test.iter().filter(|&&i| ds.class_of(i) == c).count())
                .collect();
            assert_eq!(per_class, vec![1, 1]);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let ds = dataset_with_classes(&[7, 9, 4]);
        let a = stratified_folds(&ds, 4, 99).unwrap();
        let b = stratified_folds(&ds, 4, 99).unwrap();
        assert_eq!(a, b);
        let c = stratified_folds(&ds, 4, 100).unwrap();
        assert_ne!(a, c, "different seeds should shuffle differently");
    }

    #[test]
    fn small_class_lands_in_distinct_folds() {
        let ds = dataset_with_classes(&[3, 17]);
        let plan = stratified_folds(&ds, 10, 1).unwrap();
        let folds_of_class0: Vec<usize> = (0..ds.n_instances())
            .filter(|&i| ds.class_of(i) == 0)
            .map(|i| plan.fold_of(i))
            .collect();
        let mut distinct = folds_of_class0.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn fold_count_bounds_enforced() {
        let ds = dataset_with_classes(&[2, 2]);
        assert!(stratified_folds(&ds, 1, 0).is_err());
        assert!(stratified_folds(&ds, 5, 0).is_err());
        assert!(stratified_folds(&ds, 4, 0).is_ok());
    }

    #[test]
    fn subsample_respects_cap_and_strata() {
        let ds = dataset_with_classes(&[60, 30, 10]);
        let sub = stratified_subsample(&ds, 50, 7).unwrap();
        assert_eq!(sub.n_instances(), 50);
        let h = sub.class_histogram();
        assert_eq!(h, vec![30, 15, 5]);
    }

    #[test]
    fn subsample_noop_under_cap() {
        let ds = dataset_with_classes(&[5, 5]);
        let sub = stratified_subsample(&ds, 100, 7).unwrap();
        assert_eq!(sub.n_instances(), 10);
    }

    #[test]
    fn subsample_keeps_minority_class() {
        let ds = dataset_with_classes(&[199, 1]);
        let sub = stratified_subsample(&ds, 20, 7).unwrap();
        assert!(sub.class_histogram()[1] >= 1);
    }
}
