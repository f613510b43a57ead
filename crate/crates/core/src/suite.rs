//! Multi-dataset benchmark runs with per-row failure capture.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::io::{load_arff_with_class, load_csv, CsvConfig};
use crate::pipeline::{cross_validate_pipeline, EvalReport, PipelineConfig};

/// One dataset entry of a benchmark suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    pub data: PathBuf,
    pub class_column: Option<String>,
    pub missing_token: Option<String>,
}

/// A whole suite: shared pipeline settings plus the dataset roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub pipeline: PipelineConfig,
    pub folds: usize,
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
}

/// Result of one suite row; failures are captured, not propagated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SuiteOutcome {
    Ok {
        seconds: f64,
        accuracy_pct: f64,
        rmse: f64,
        original_attributes: usize,
        reduced_attributes: f64,
        report: Box<EvalReport>,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub number: usize,
    pub dataset: String,
    pub outcome: SuiteOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn succeeded(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.outcome, SuiteOutcome::Ok { .. }))
            .count()
    }

    /// `(dataset, aggregate accuracy %)` pairs of the successful rows.
    pub fn accuracies(&self) -> Vec<(String, f64)> {
        self.rows
            .iter()
            .filter_map(|r| match &r.outcome {
                SuiteOutcome::Ok { accuracy_pct, .. } => Some((r.dataset.clone(), *accuracy_pct)),
                SuiteOutcome::Error { .. } => None,
            })
            .collect()
    }

    /// Aligned table with time / accuracy / RMSE / attribute-reduction
    /// columns, one row per dataset, error rows included.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<7} {:<24} {:>15} {:>13} {:>8} {:>15}\n",
            "Number", "Dataset", "Time in seconds", "Accuracy in %", "RMSE", "Attributes"
        ));
        for row in &self.rows {
            match &row.outcome {
                SuiteOutcome::Ok {
                    seconds,
                    accuracy_pct,
                    rmse,
                    original_attributes,
                    reduced_attributes,
                    ..
                } => {
                    out.push_str(&format!(
                        "{:<7} {:<24} {:>15.2} {:>13.2} {:>8.4} {:>10} -> {:.1}\n",
                        row.number,
                        row.dataset,
                        seconds,
                        accuracy_pct,
                        rmse,
                        original_attributes,
                        reduced_attributes,
                    ));
                }
                SuiteOutcome::Error { message } => {
                    out.push_str(&format!(
                        "{:<7} {:<24} ERROR: {}\n",
                        row.number, row.dataset, message
                    ));
                }
            }
        }
        out
    }
}

/// Loads a suite entry by file extension: `.arff` uses the ARFF reader,
/// anything else the CSV reader.
pub fn load_entry(entry: &SuiteEntry) -> Result<Dataset> {
    let is_arff = entry
        .data
        .extension()
        .map(|e| e.eq_ignore_ascii_case("arff"))
        .unwrap_or(false);
    if is_arff {
        load_arff_with_class(&entry.data, entry.class_column.as_deref())
    } else {
        let cfg = CsvConfig {
            class_column: entry.class_column.clone(),
            missing_token: entry.missing_token.clone().unwrap_or_else(|| "?".into()),
        };
        load_csv(&entry.data, &cfg)
    }
}

/// Runs every entry of the suite. A failing entry yields an error row; the
/// suite itself always returns.
pub fn benchmark_suite(config: &SuiteConfig) -> SuiteReport {
    let rows = config
        .entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let outcome = run_entry(entry, config);
            SuiteRow {
                number: i + 1,
                dataset: entry.name.clone(),
                outcome,
            }
        })
        .collect();
    SuiteReport { rows }
}

fn run_entry(entry: &SuiteEntry, config: &SuiteConfig) -> SuiteOutcome {
    let result = load_entry(entry).and_then(|dataset| {
        cross_validate_pipeline(&dataset, &config.pipeline, config.folds, config.seed)
    });
    match result {
        Ok(report) => SuiteOutcome::Ok {
            seconds: report.aggregate.train_seconds,
            accuracy_pct: report.aggregate.accuracy * 100.0,
            rmse: report.aggregate.rmse,
            original_attributes: report.n_attributes,
            reduced_attributes: report.aggregate.mean_selected_cardinality,
            report: Box::new(report),
        },
        Err(e) => SuiteOutcome::Error {
            message: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(dir: &std::path::Path, name: &str, rows: usize) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "x,c,y").unwrap();
        for i in 0..rows {
            let y = i % 2;
            writeln!(f, "{},{},{}", i, if i % 3 == 0 { "a" } else { "b" }, y).unwrap();
        }
        f.flush().unwrap();
        path
    }

    fn suite_config(entries: Vec<SuiteEntry>) -> SuiteConfig {
        SuiteConfig {
            pipeline: PipelineConfig::default(),
            folds: 4,
            seed: 3,
            entries,
        }
    }

    #[test]
    fn empty_suite_yields_empty_table() {
        let report = benchmark_suite(&suite_config(vec![]));
        assert!(report.rows.is_empty());
        assert_eq!(report.succeeded(), 0);
    }

    #[test]
    fn bad_path_becomes_error_row_and_others_survive() {
        let dir = tempfile::tempdir().unwrap();
        let good = write_csv(dir.path(), "good.csv", 40);
        let entries = vec![
            SuiteEntry {
                name: "good".into(),
                data: good,
                class_column: None,
                missing_token: None,
            },
            SuiteEntry {
                name: "missing".into(),
                data: dir.path().join("nope.csv"),
                class_column: None,
                missing_token: None,
            },
        ];
        let report = benchmark_suite(&suite_config(entries));
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.succeeded(), 1);
        assert!(matches!(report.rows[1].outcome, SuiteOutcome::Error { .. }));
        let table = report.human_table();
        assert!(table.contains("good"));
        assert!(table.contains("ERROR"));
    }

    #[test]
    fn accuracies_lists_successful_rows() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_csv(dir.path(), "a.csv", 30);
        let entries = vec![SuiteEntry {
            name: "a".into(),
            data: a,
            class_column: None,
            missing_token: None,
        }];
        let report = benchmark_suite(&suite_config(entries));
        let acc = report.accuracies();
        assert_eq!(acc.len(), 1);
        assert_eq!(acc[0].0, "a");
        assert!((0.0..=100.0).contains(&acc[0].1));
    }
}
