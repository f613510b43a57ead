//! Unsupervised binning of numeric attributes.
//!
//! Cut points are computed from the dataset that is passed in — callers
//! hand over the training split only — and are recorded on the returned
//! dataset so the identical transform can be replayed on held-out data.

use serde::{Deserialize, Serialize};

use crate::dataset::{AttrKind, AttributeSpec, Cell, CutPoints, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscretizeStrategy {
    EqualFrequency,
    EqualWidth,
}

impl std::fmt::Display for DiscretizeStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscretizeStrategy::EqualFrequency => f.write_str("equal_frequency"),
            DiscretizeStrategy::EqualWidth => f.write_str("equal_width"),
        }
    }
}

/// Turns every numeric attribute into a nominal one with at most `bins`
/// labels. Nominal attributes pass through untouched, missing cells stay
/// missing, and degenerate columns collapse to fewer bins.
pub fn discretize(dataset: &Dataset, strategy: DiscretizeStrategy, bins: usize) -> Result<Dataset> {
    if bins < 1 {
        return Err(Error::Argument("bins must be at least 1".into()));
    }

    let n = dataset.n_attributes();
    let mut attributes = Vec::with_capacity(n);
    let mut cuts: CutPoints = Vec::with_capacity(n);

    for (a, spec) in dataset.attributes().iter().enumerate() {
        match spec.kind {
            AttrKind::Nominal => {
                attributes.push(spec.clone());
                cuts.push(None);
            }
            AttrKind::Numeric => {
                let mut values: Vec<f64> = (0..dataset.n_instances())
                    .filter_map(|r| dataset.row(r)[a].number())
                    .collect();
                values.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN numeric cells"));
                let cut = match strategy {
                    DiscretizeStrategy::EqualFrequency => equal_frequency_cuts(&values, bins),
                    DiscretizeStrategy::EqualWidth => equal_width_cuts(&values, bins),
                };
                let labels = (0..cut.len() + 1).map(|b| format!("bin{b}")).collect();
                attributes.push(AttributeSpec::nominal(&spec.name, labels));
                cuts.push(Some(cut));
            }
        }
    }

    let rows = bin_rows(dataset, &attributes, &cuts);
    dataset.replace_columns(attributes, rows, cuts)
}

/// Applies the cut points recorded on `template` to `raw`, which must share
/// the template's pre-discretization schema. Replaying onto the dataset the
/// cuts came from reproduces it bit-exactly.
pub fn replay(template: &Dataset, raw: &Dataset) -> Result<Dataset> {
    let cuts = template
        .cut_points()
        .ok_or_else(|| Error::Argument("template dataset has no recorded cut points".into()))?;
    if raw.n_attributes() != template.n_attributes() {
        return Err(Error::Schema(format!(
            "attribute count mismatch: template {}, data {}",
            template.n_attributes(),
            raw.n_attributes()
        )));
    }
    for (t, r) in template.attributes().iter().zip(raw.attributes()) {
        if t.name != r.name {
            return Err(Error::Schema(format!(
                "attribute name mismatch: {:?} vs {:?}",
                t.name, r.name
            )));
        }
    }
    if template.class_spec() != raw.class_spec() {
        return Err(Error::Schema("class attribute mismatch".into()));
    }
    for (a, c) in cuts.iter().enumerate() {
        let want = if c.is_some() { AttrKind::Numeric } else { AttrKind::Nominal };
        if raw.attributes()[a].kind != want {
            return Err(Error::Schema(format!(
                "attribute {:?} kind does not match recorded transform",
                raw.attributes()[a].name
            )));
        }
    }

    let rows = bin_rows(raw, template.attributes(), cuts);
    raw.replace_columns(template.attributes().to_vec(), rows, cuts.clone())
}

fn bin_rows(source: &Dataset, attributes: &[AttributeSpec], cuts: &CutPoints) -> Vec<Vec<Cell>> {
    (0..source.n_instances())
        .map(|r| {
            source
                .row(r)
                .iter()
                .enumerate()
                .map(|(a, cell)| match (&cuts[a], cell) {
                    (_, Cell::Missing) => Cell::Missing,
                    (None, c) => *c,
                    (Some(cut), Cell::Num(v)) => {
                        let b = bin_of(*v, cut);
                        debug_assert!(b < attributes[a].n_values());
                        Cell::Idx(b as u32)
                    }
                    (Some(_), Cell::Idx(_)) => unreachable!("numeric column holds an index"),
                })
                .collect()
        })
        .collect()
}

/// Bin index = number of cut points strictly below the value.
fn bin_of(v: f64, cuts: &[f64]) -> usize {
    cuts.iter().take_while(|&&c| v > c).count()
}

/// Midpoint cuts at the equal-count boundaries of the sorted sample.
/// Boundaries falling inside a run of ties are skipped, so a column with few
/// distinct values collapses to fewer bins.
fn equal_frequency_cuts(sorted: &[f64], bins: usize) -> Vec<f64> {
    let len = sorted.len();
    if bins < 2 || len < 2 {
        return Vec::new();
    }
    let mut cuts = Vec::new();
    for k in 1..bins {
        let r = k * len / bins;
        if r == 0 || r >= len {
            continue;
        }
        let (lo, hi) = (sorted[r - 1], sorted[r]);
        if hi > lo {
            let cut = lo + (hi - lo) / 2.0;
            if cuts.last().is_none_or(|&last| cut > last) {
                cuts.push(cut);
            }
        }
    }
    cuts
}

fn equal_width_cuts(sorted: &[f64], bins: usize) -> Vec<f64> {
    if bins < 2 || sorted.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if hi <= lo {
        return Vec::new();
    }
    let width = (hi - lo) / bins as f64;
    let mut cuts = Vec::new();
    for k in 1..bins {
        let cut = lo + width * k as f64;
        if cut < hi && cuts.last().is_none_or(|&last| cut > last) {
            cuts.push(cut);
        }
    }
    cuts
}
