//! Semi-naive Bayes classification with evolutionary feature selection.
//!
//! The crate has four layers:
//!
//! * [`dataset`], [`io`], [`discretize`], [`folds`] — loading, binning,
//!   masking, and stratified splitting of nominal-attribute datasets.
//! * [`cube`], [`classifier`] — single-pass joint frequency counting and
//!   the naive Bayes / averaged one-dependence estimators built on it.
//! * [`moea`] — multi-objective evolutionary wrapper feature selection over
//!   binary attribute masks, with slot-local (ENORA) and global (NSGA-II)
//!   non-domination ranking.
//! * [`metrics`], [`pipeline`], [`suite`] — evaluation metrics, leak-free
//!   outer cross-validation of the select-then-classify pipeline, and the
//!   benchmark table generator.
//!
//! Everything stochastic is seeded; fixed seeds give bit-identical results,
//! including under the parallel evaluation paths.

pub mod classifier;
pub mod cube;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod folds;
pub mod io;
pub mod mask;
pub mod metrics;
pub mod moea;
pub mod pipeline;
pub mod seeding;
pub mod suite;

pub use classifier::{fit_aode, fit_nb, AodeModel, ClassDistribution, NbModel};
pub use dataset::{apply_mask, AttrKind, AttributeSpec, Cell, Dataset};
pub use discretize::{discretize, replay, DiscretizeStrategy};
pub use error::{Error, Result};
pub use folds::{stratified_folds, stratified_subsample, FoldPlan};
pub use io::{load_arff, load_arff_with_class, load_csv, CsvConfig};
pub use mask::FeatureMask;
