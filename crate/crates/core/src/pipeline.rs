//! Outer cross-validation of the select-then-classify pipeline.
//!
//! Per outer fold everything is computed on the training split only:
//! discretization cuts, the evolutionary selector's mask, and the classifier
//! fit. The held-out split is binned by replaying the recorded cuts and then
//! predicted. No test information can reach training — the splits are
//! physically disjoint datasets, which the fold instrumentation asserts.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit_aode, fit_nb};
use crate::dataset::Dataset;
use crate::discretize::{discretize, replay, DiscretizeStrategy};
use crate::error::Result;
use crate::folds::stratified_folds;
use crate::mask::FeatureMask;
use crate::metrics::{accuracy, rmse, zero_one_loss, PredictionRecord};
use crate::moea::{
    run_moea, ClassifierKind, EvaluatorConfig, MoeaConfig, ParetoResult, RankingStrategy,
    TracePoint,
};
use crate::seeding;

/// Full pipeline settings: optional selector, classifier, and binning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// `None` disables selection (all attributes kept).
    pub selector: Option<RankingStrategy>,
    pub population_size: usize,
    pub generations: usize,
    pub slots: Option<usize>,
    pub inner_folds: usize,
    pub subsample_cap: usize,
    pub classifier: ClassifierKind,
    pub bins: usize,
    pub strategy: DiscretizeStrategy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            selector: None,
            population_size: 50,
            generations: 50,
            slots: None,
            inner_folds: 5,
            subsample_cap: 2000,
            classifier: ClassifierKind::Aode { m_threshold: 1 },
            bins: 10,
            strategy: DiscretizeStrategy::EqualFrequency,
        }
    }
}

impl PipelineConfig {
    fn moea_config(&self, ranking: RankingStrategy, seed: u64) -> MoeaConfig {
        MoeaConfig {
            population_size: self.population_size,
            generations: self.generations,
            ranking,
            slots: self.slots,
            evaluator: EvaluatorConfig {
                inner_folds: self.inner_folds,
                subsample_cap: self.subsample_cap,
                classifier: self.classifier,
            },
            seed,
        }
    }
}

/// One member of a reported Pareto front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub mask: String,
    pub merit: f64,
    pub cardinality: usize,
}

/// Serialized outcome of the fold's evolutionary search: the full
/// non-dominated front, the per-generation trace, and the fitness-call count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub evaluations: u64,
    pub front: Vec<FrontMember>,
    pub trace: Vec<TracePoint>,
}

impl SelectionReport {
    fn from_result(result: &ParetoResult) -> Self {
        SelectionReport {
            evaluations: result.evaluations,
            front: result
                .nondominated
                .iter()
                .map(|ind| FrontMember {
                    mask: ind.mask.to_bitstring(),
                    merit: ind.objectives().merit,
                    cardinality: ind.objectives().cardinality,
                })
                .collect(),
            trace: result.trace.clone(),
        }
    }
}

/// Metrics and timings of one outer fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub zero_one_loss: f64,
    pub rmse: f64,
    /// Selector time plus classifier fit time, in seconds.
    pub train_seconds: f64,
    pub test_seconds: f64,
    pub selected_mask: String,
    pub selected_cardinality: usize,
    /// Present when a selector ran.
    pub selection: Option<SelectionReport>,
}

/// Metrics pooled over every held-out prediction of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub n_predictions: usize,
    pub accuracy: f64,
    pub zero_one_loss: f64,
    pub rmse: f64,
    pub train_seconds: f64,
    pub test_seconds: f64,
    pub mean_selected_cardinality: f64,
}

/// One cross-validation run: config echo, seed, per-fold rows, aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: PipelineConfig,
    pub outer_folds: usize,
    pub seed: u64,
    pub n_instances: usize,
    pub n_attributes: usize,
    pub n_classes: usize,
    pub per_fold: Vec<FoldReport>,
    pub aggregate: AggregateReport,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::Error::Serialization(e.to_string()))
    }

    /// Aligned per-fold table plus the aggregate row.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        out.push_str("fold  n_test  accuracy  0-1 loss  rmse    train_s  test_s  selected\n");
        for f in &self.per_fold {
            out.push_str(&format!(
                "{:<4}  {:<6}  {:<8.4}  {:<8.4}  {:<6.4}  {:<7.2}  {:<6.2}  {} ({})\n",
                f.fold,
                f.n_test,
                f.accuracy,
                f.zero_one_loss,
                f.rmse,
                f.train_seconds,
                f.test_seconds,
                f.selected_mask,
                f.selected_cardinality,
            ));
        }
        let a = &self.aggregate;
        out.push_str(&format!(
            "all   {:<6}  {:<8.4}  {:<8.4}  {:<6.4}  {:<7.2}  {:<6.2}  mean cardinality {:.2}\n",
            a.n_predictions,
            a.accuracy,
            a.zero_one_loss,
            a.rmse,
            a.train_seconds,
            a.test_seconds,
            a.mean_selected_cardinality,
        ));
        out
    }

    /// One-line aggregate summary.
    pub fn aggregate_line(&self) -> String {
        let a = &self.aggregate;
        format!(
            "accuracy {:.4} | 0-1 loss {:.4} | rmse {:.4} | train {:.2}s | test {:.2}s | mean selected {:.2}/{}",
            a.accuracy,
            a.zero_one_loss,
            a.rmse,
            a.train_seconds,
            a.test_seconds,
            a.mean_selected_cardinality,
            self.n_attributes,
        )
    }
}

/// Runs `k`-fold outer cross-validation of the configured pipeline.
///
/// Folds are independent and run in parallel; each derives its RNG streams
/// from `(seed, fold)`, so the report is bit-identical across schedules
/// (wall-time fields aside).
pub fn cross_validate_pipeline(
    dataset: &Dataset,
    config: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let plan = stratified_folds(dataset, k, seed)?;

    let fold_outputs: Vec<(FoldReport, Vec<PredictionRecord>)> = (0..k)
        .into_par_iter()
        .map(|fold| {
            run_fold(
                dataset,
                config,
                &plan.train_indices(fold),
                &plan.test_indices(fold),
                fold,
                seed,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_fold = Vec::with_capacity(k);
    let mut pooled: Vec<PredictionRecord> = Vec::with_capacity(dataset.n_instances());
    for (report, records) in fold_outputs {
        per_fold.push(report);
        pooled.extend(records);
    }

    let aggregate = AggregateReport {
        n_predictions: pooled.len(),
        accuracy: accuracy(&pooled)?,
        zero_one_loss: zero_one_loss(&pooled)?,
        rmse: rmse(&pooled, dataset.n_classes())?,
        train_seconds: per_fold.iter().map(|f| f.train_seconds).sum(),
        test_seconds: per_fold.iter().map(|f| f.test_seconds).sum(),
        mean_selected_cardinality: per_fold
            .iter()
            .map(|f| f.selected_cardinality as f64)
            .sum::<f64>()
            / per_fold.len() as f64,
    };

    Ok(EvalReport {
        config: config.clone(),
        outer_folds: k,
        seed,
        n_instances: dataset.n_instances(),
        n_attributes: dataset.n_attributes(),
        n_classes: dataset.n_classes(),
        per_fold,
        aggregate,
    })
}

enum Fitted {
    Nb(crate::classifier::NbModel),
    Aode(crate::classifier::AodeModel),
}

fn run_fold(
    dataset: &Dataset,
    config: &PipelineConfig,
    train_idx: &[usize],
    test_idx: &[usize],
    fold: usize,
    seed: u64,
) -> Result<(FoldReport, Vec<PredictionRecord>)> {
    let train = dataset.subset_rows(train_idx)?;
    let test = dataset.subset_rows(test_idx)?;
    debug_assert!(
        {
            let train_ids: std::collections::HashSet<usize> =
                (0..train.n_instances()).map(|i| train.source_id(i)).collect();
            (0..test.n_instances()).all(|i| !train_ids.contains(&test.source_id(i)))
        },
        "leakage: a test row reached the training split"
    );

    // Cuts come from the training split only; the test split replays them.
    let train_d = discretize(&train, config.strategy, config.bins)?;

    let select_start = Instant::now();
    let (mask, selection) = match config.selector {
        None => (FeatureMask::ones(dataset.n_attributes()), None),
        Some(ranking) => {
            let moea_cfg = config.moea_config(ranking, seeding::derive(seed, fold as u64 + 1));
            let result = run_moea(&train_d, &moea_cfg)?;
            let report = SelectionReport::from_result(&result);
            (result.selected, Some(report))
        }
    };
    let selector_seconds = select_start.elapsed().as_secs_f64();

    let masked_train = train_d.apply_mask(&mask)?;
    let fit_start = Instant::now();
    let model = match config.classifier {
        ClassifierKind::Nb => Fitted::Nb(fit_nb(&masked_train)?),
        ClassifierKind::Aode { m_threshold } => Fitted::Aode(fit_aode(&masked_train, m_threshold)?),
    };
    let fit_seconds = fit_start.elapsed().as_secs_f64();

    let test_d = replay(&train_d, &test)?;
    let masked_test = test_d.apply_mask(&mask)?;
    let test_start = Instant::now();
    let mut records = Vec::with_capacity(masked_test.n_instances());
    for i in 0..masked_test.n_instances() {
        let dist = match &model {
            Fitted::Nb(m) => m.predict(masked_test.row(i))?,
            Fitted::Aode(m) => m.predict(masked_test.row(i))?,
        };
        records.push(PredictionRecord::new(masked_test.class_of(i) as usize, dist));
    }
    let test_seconds = test_start.elapsed().as_secs_f64();

    let report = FoldReport {
        fold,
        n_test: records.len(),
        accuracy: accuracy(&records)?,
        zero_one_loss: zero_one_loss(&records)?,
        rmse: rmse(&records, dataset.n_classes())?,
        train_seconds: selector_seconds + fit_seconds,
        test_seconds,
        selected_mask: mask.to_bitstring(),
        selected_cardinality: mask.cardinality(),
        selection,
    };
    Ok((report, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Cell};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mixed_dataset(rows: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attrs = vec![
            AttributeSpec::numeric("x"),
            AttributeSpec::nominal("c", vec!["a".into(), "b".into()]),
            AttributeSpec::numeric("z"),
        ];
        let class = AttributeSpec::nominal("y", vec!["p".into(), "n".into()]);
        let mut data = Vec::new();
        let mut classes = Vec::new();
        for _ in 0..rows {
            let y: u32 = rng.gen_range(0..2);
            let x = y as f64 * 2.0 + rng.gen::<f64>(); // informative
            let z: f64 = rng.gen(); // noise
            data.push(vec![
                Cell::Num(x),
                Cell::Idx(rng.gen_range(0..2)),
                Cell::Num(z),
            ]);
            classes.push(y);
        }
        Dataset::new(attrs, class, data, classes).unwrap()
    }

    #[test]
    fn selector_none_keeps_all_attributes() {
        let ds = mixed_dataset(60, 1);
        let report = cross_validate_pipeline(&ds, &PipelineConfig::default(), 5, 3).unwrap();
        for f in &report.per_fold {
            assert_eq!(f.selected_mask, "111");
            assert_eq!(f.selected_cardinality, 3);
        }
        assert_eq!(report.aggregate.n_predictions, 60);
    }

    #[test]
    fn zero_one_loss_is_exactly_one_minus_accuracy() {
        let ds = mixed_dataset(50, 2);
        let report = cross_validate_pipeline(&ds, &PipelineConfig::default(), 5, 7).unwrap();
        for f in &report.per_fold {
            assert_eq!(f.zero_one_loss, 1.0 - f.accuracy);
        }
        assert_eq!(report.aggregate.zero_one_loss, 1.0 - report.aggregate.accuracy);
    }

    #[test]
    fn pooled_accuracy_is_instance_weighted_fold_mean() {
        let ds = mixed_dataset(53, 3); // uneven folds on purpose
        let report = cross_validate_pipeline(&ds, &PipelineConfig::default(), 4, 11).unwrap();
        let weighted: f64 = report
            .per_fold
            .iter()
            .map(|f| f.accuracy * f.n_test as f64)
            .sum::<f64>()
            / report.aggregate.n_predictions as f64;
        assert!((report.aggregate.accuracy - weighted).abs() < 1e-12);
    }

    #[test]
    fn identical_runs_produce_identical_metrics() {
        let ds = mixed_dataset(60, 4);
        let cfg = PipelineConfig {
            selector: Some(RankingStrategy::Enora),
            population_size: 8,
            generations: 3,
            inner_folds: 3,
            ..PipelineConfig::default()
        };
        let a = cross_validate_pipeline(&ds, &cfg, 3, 5).unwrap();
        let b = cross_validate_pipeline(&ds, &cfg, 3, 5).unwrap();
        assert_eq!(a.aggregate.accuracy, b.aggregate.accuracy);
        assert_eq!(a.aggregate.rmse, b.aggregate.rmse);
        let masks_a: Vec<&str> = a.per_fold.iter().map(|f| f.selected_mask.as_str()).collect();
        let masks_b: Vec<&str> = b.per_fold.iter().map(|f| f.selected_mask.as_str()).collect();
        assert_eq!(masks_a, masks_b);
    }

    #[test]
    fn moea_params_do_not_affect_unselected_runs() {
        let ds = mixed_dataset(40, 5);
        let base = PipelineConfig::default();
        let other = PipelineConfig {
            population_size: 4,
            generations: 1,
            inner_folds: 2,
            ..PipelineConfig::default()
        };
        let a = cross_validate_pipeline(&ds, &base, 4, 9).unwrap();
        let b = cross_validate_pipeline(&ds, &other, 4, 9).unwrap();
        assert_eq!(a.aggregate.accuracy, b.aggregate.accuracy);
        assert_eq!(a.aggregate.rmse, b.aggregate.rmse);
    }

    #[test]
    fn selection_runs_end_to_end() {
        let ds = mixed_dataset(80, 6);
        let cfg = PipelineConfig {
            selector: Some(RankingStrategy::Nsga2),
            population_size: 8,
            generations: 4,
            inner_folds: 3,
            ..PipelineConfig::default()
        };
        let report = cross_validate_pipeline(&ds, &cfg, 4, 13).unwrap();
        assert!(report.aggregate.mean_selected_cardinality <= 3.0);
        assert!(report.aggregate.accuracy > 0.5, "informative attribute should help");
        for f in &report.per_fold {
            assert!(f.selected_cardinality >= 1);
            let sel = f.selection.as_ref().expect("selector ran; report carries the front");
            assert!(sel.evaluations > 0);
            assert_eq!(sel.trace.len(), 4 + 1);
            assert!(sel.front.iter().any(|m| m.mask == f.selected_mask));
        }
    }

    #[test]
    fn selector_none_omits_selection_report() {
        let ds = mixed_dataset(40, 8);
        let report = cross_validate_pipeline(&ds, &PipelineConfig::default(), 4, 2).unwrap();
        assert!(report.per_fold.iter().all(|f| f.selection.is_none()));
    }

    #[test]
    fn report_json_round_trip() {
        let ds = mixed_dataset(40, 7);
        let report = cross_validate_pipeline(&ds, &PipelineConfig::default(), 4, 1).unwrap();
        let restored = EvalReport::from_json(&report.to_json()).unwrap();
        assert_eq!(report, restored);
    }
}
