//! Wrapper fitness: inner-CV accuracy of the downstream classifier on the
//! masked training data.
//!
//! The evaluator subsamples and folds the training split once per run, fits
//! one frequency model per inner fold on the *unmasked* data, and scores a
//! candidate mask by restricting prediction to the selected attributes.
//! Pair and marginal counts over an attribute subset are unaffected by the
//! other attributes, so this equals fitting on the masked data (see
//! `evaluate_mask_direct`, the literal reference path used by tests).
//!
//! Results are memoized by mask bits; re-evaluating an identical mask is a
//! cache hit and does not count as a fitness call.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::rank::Objectives;
use crate::classifier::{fit_aode, fit_nb, AodeModel, ClassDistribution, NbModel};
use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};
use crate::folds::{stratified_folds, stratified_subsample};
use crate::mask::FeatureMask;
use crate::seeding;

const SALT_SUBSAMPLE: u64 = 0x7355_4253;
const SALT_INNER_FOLDS: u64 = 0x494e_4e52;

/// Which classifier the wrapper trains and scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierKind {
    Nb,
    Aode { m_threshold: u64 },
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassifierKind::Nb => f.write_str("nb"),
            ClassifierKind::Aode { .. } => f.write_str("aode"),
        }
    }
}

/// Wrapper-evaluation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorConfig {
    /// Stratified inner folds per fitness evaluation (≥ 2).
    pub inner_folds: usize,
    /// Maximum instances used for fitness; larger training splits are
    /// stratified-subsampled once per run. No-op when already within the cap.
    pub subsample_cap: usize,
    pub classifier: ClassifierKind,
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        EvaluatorConfig {
            inner_folds: 5,
            subsample_cap: 2000,
            classifier: ClassifierKind::Aode { m_threshold: 1 },
        }
    }
}

impl EvaluatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inner_folds < 2 {
            return Err(Error::Argument("inner_folds must be at least 2".into()));
        }
        if self.subsample_cap == 0 {
            return Err(Error::Argument("subsample cap must be positive".into()));
        }
        if let ClassifierKind::Aode { m_threshold } = self.classifier {
            if m_threshold < 1 {
                return Err(Error::Argument("m_threshold must be a positive integer".into()));
            }
        }
        Ok(())
    }
}

enum FoldModel {
    Nb(NbModel),
    Aode(AodeModel),
}

impl FoldModel {
    fn predict_with_attrs(&self, instance: &[Cell], attrs: &[usize]) -> Result<ClassDistribution> {
        match self {
            FoldModel::Nb(m) => m.predict_with_attrs(instance, attrs),
            FoldModel::Aode(m) => m.predict_with_attrs(instance, attrs),
        }
    }
}

struct InnerFold {
    model: FoldModel,
    test: Vec<(Vec<Cell>, u32)>,
}

/// Memoizing wrapper-fitness evaluator over a fixed training split.
pub struct FitnessEvaluator {
    folds: Vec<InnerFold>,
    n_attributes: usize,
    cache: RwLock<HashMap<Vec<bool>, Objectives>>,
    calls: AtomicU64,
}

impl FitnessEvaluator {
    /// Prepares the evaluator: one stratified subsample, one fold plan, and
    /// one fitted model per inner fold, all derived from `seed`.
    pub fn new(train: &Dataset, cfg: &EvaluatorConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let sub = stratified_subsample(train, cfg.subsample_cap, seeding::derive(seed, SALT_SUBSAMPLE))?;
        let plan = stratified_folds(&sub, cfg.inner_folds, seeding::derive(seed, SALT_INNER_FOLDS))?;

        let mut folds = Vec::with_capacity(cfg.inner_folds);
        for fold in 0..plan.k() {
            let fit_split = sub.subset_rows(&plan.train_indices(fold))?;
            let model = match cfg.classifier {
                ClassifierKind::Nb => FoldModel::Nb(fit_nb(&fit_split)?),
                ClassifierKind::Aode { m_threshold } => {
                    FoldModel::Aode(fit_aode(&fit_split, m_threshold)?)
                }
            };
            let test = plan
                .test_indices(fold)
                .iter()
                .map(|&i| (sub.row(i).to_vec(), sub.class_of(i)))
                .collect();
            folds.push(InnerFold { model, test });
        }

        Ok(FitnessEvaluator {
            folds,
            n_attributes: train.n_attributes(),
            cache: RwLock::new(HashMap::new()),
            calls: AtomicU64::new(0),
        })
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    /// Distinct-mask evaluations performed so far (cache hits excluded).
    pub fn fitness_calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    /// Merit (mean inner-fold accuracy) and cardinality for `mask`.
    pub fn evaluate(&self, mask: &FeatureMask) -> Result<Objectives> {
        if mask.len() != self.n_attributes {
            return Err(Error::Argument(format!(
                "mask length {} does not match {} attributes",
                mask.len(),
                self.n_attributes
            )));
        }
        let key: Vec<bool> = mask.bits().to_vec();
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(*hit);
        }

        let attrs = mask.selected_indices();
        let mut fold_accuracies = Vec::with_capacity(self.folds.len());
        for fold in &self.folds {
            let mut correct = 0usize;
            for (instance, truth) in &fold.test {
                let dist = fold.model.predict_with_attrs(instance, &attrs)?;
                if dist.argmax() as u32 == *truth {
                    correct += 1;
                }
            }
            fold_accuracies.push(correct as f64 / fold.test.len() as f64);
        }
        let merit = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
        let objectives = Objectives {
            merit,
            cardinality: mask.cardinality(),
        };

        // First inserter wins the call count; racing duplicates computed the
        // same value, so the count stays deterministic.
        let mut cache = self.cache.write().expect("cache lock");
        if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(key) {
            slot.insert(objectives);
            self.calls.fetch_add(1, Ordering::SeqCst);
        }
        Ok(objectives)
    }
}

/// Literal mask evaluation: subsample, apply the mask, split into stratified
/// inner folds, refit the classifier per fold, and average the accuracies.
/// Slower than [`FitnessEvaluator::evaluate`] but definitionally identical;
/// kept as the reference path the evaluator is tested against.
pub fn evaluate_mask_direct(
    mask: &FeatureMask,
    train: &Dataset,
    cfg: &EvaluatorConfig,
    seed: u64,
) -> Result<Objectives> {
    cfg.validate()?;
    if mask.cardinality() < 1 {
        return Err(Error::Argument("mask selects no attribute".into()));
    }
    let sub = stratified_subsample(train, cfg.subsample_cap, seeding::derive(seed, SALT_SUBSAMPLE))?;
    let masked = sub.apply_mask(mask)?;
    let plan = stratified_folds(&masked, cfg.inner_folds, seeding::derive(seed, SALT_INNER_FOLDS))?;

    let mut fold_accuracies = Vec::with_capacity(plan.k());
    for fold in 0..plan.k() {
        let fit_split = masked.subset_rows(&plan.train_indices(fold))?;
        let test_idx = plan.test_indices(fold);
        let mut correct = 0usize;
        match cfg.classifier {
            ClassifierKind::Nb => {
                let model = fit_nb(&fit_split)?;
                for &i in &test_idx {
                    if model.predict(masked.row(i))?.argmax() as u32 == masked.class_of(i) {
                        correct += 1;
                    }
                }
            }
            ClassifierKind::Aode { m_threshold } => {
                let model = fit_aode(&fit_split, m_threshold)?;
                for &i in &test_idx {
                    if model.predict(masked.row(i))?.argmax() as u32 == masked.class_of(i) {
                        correct += 1;
                    }
                }
            }
        }
        fold_accuracies.push(correct as f64 / test_idx.len() as f64);
    }
    Ok(Objectives {
        merit: fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64,
        cardinality: mask.cardinality(),
    })
}
