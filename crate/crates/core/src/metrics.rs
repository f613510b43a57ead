//! Classification metrics and win-tie-loss comparison.

use serde::{Deserialize, Serialize};

use crate::classifier::ClassDistribution;
use crate::error::{Error, Result};

/// One held-out prediction: the true class, the predicted distribution, and
/// the argmax decision (ties to the lowest class index, by construction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub truth: usize,
    pub distribution: ClassDistribution,
    pub predicted: usize,
}

impl PredictionRecord {
    pub fn new(truth: usize, distribution: ClassDistribution) -> Self {
        let predicted = distribution.argmax();
        PredictionRecord {
            truth,
            distribution,
            predicted,
        }
    }
}

/// Fraction of records whose decision matches the truth.
pub fn accuracy(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Argument("no prediction records".into()));
    }
    let correct = records.iter().filter(|r| r.predicted == r.truth).count();
    Ok(correct as f64 / records.len() as f64)
}

/// Exactly `1 − accuracy`.
pub fn zero_one_loss(records: &[PredictionRecord]) -> Result<f64> {
    Ok(1.0 - accuracy(records)?)
}

/// Root mean square gap between predicted distributions and one-hot truth:
/// `sqrt( (1/(N·C)) Σ_records Σ_classes (p̂_c − 1[truth = c])² )`.
/// Dividing by the class count keeps values in [0,1] across class arities.
pub fn rmse(records: &[PredictionRecord], n_classes: usize) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Argument("no prediction records".into()));
    }
    let mut total = 0.0f64;
    for r in records {
        if r.distribution.len() != n_classes {
            return Err(Error::Argument(format!(
                "distribution over {} classes, expected {n_classes}",
                r.distribution.len()
            )));
        }
        for (c, &p) in r.distribution.probabilities().iter().enumerate() {
            let t = if c == r.truth { 1.0 } else { 0.0 };
            total += (p - t) * (p - t);
        }
    }
    Ok((total / (records.len() * n_classes) as f64).sqrt())
}

/// Win/tie/loss tally of one method against another across datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtlSummary {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl std::fmt::Display for WtlSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}-{}", self.wins, self.ties, self.losses)
    }
}

/// Per-dataset comparison: a tie when `|a − b| ≤ tie_tolerance`, otherwise a
/// win or loss for `a` in the direction given by `higher_is_better`.
pub fn win_tie_loss(
    metrics_a: &[f64],
    metrics_b: &[f64],
    higher_is_better: bool,
    tie_tolerance: f64,
) -> Result<WtlSummary> {
    if metrics_a.len() != metrics_b.len() {
        return Err(Error::Argument(format!(
            "mismatched lengths: {} vs {}",
            metrics_a.len(),
            metrics_b.len()
        )));
    }
    if tie_tolerance < 0.0 {
        return Err(Error::Argument("tie tolerance must be non-negative".into()));
    }
    let mut summary = WtlSummary {
        wins: 0,
        ties: 0,
        losses: 0,
    };
    for (&a, &b) in metrics_a.iter().zip(metrics_b) {
        if (a - b).abs() <= tie_tolerance {
            summary.ties += 1;
        } else if (a > b) == higher_is_better {
            summary.wins += 1;
        } else {
            summary.losses += 1;
        }
    }
    Ok(summary)
}
