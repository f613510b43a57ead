//! Column-typed tabular datasets for nominal-attribute classification.
//!
//! A [`Dataset`] holds predictive attribute columns plus a nominal class
//! column. Nominal cells are stored as indices into their attribute's value
//! list; numeric cells keep their raw value until discretization turns the
//! column nominal. The class is never missing in a stored row — loaders drop
//! such rows on the way in.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::FeatureMask;

/// Attribute kind: nominal columns carry an ordered label list, numeric
/// columns are raw values awaiting discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttrKind {
    Nominal,
    Numeric,
}

/// Schema entry for one column.
///
/// For nominal attributes the position of a label in `values` is the value
/// index used by every row; it is stable for the lifetime of the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttrKind,
    pub values: Vec<String>,
}

impl AttributeSpec {
    pub fn nominal(name: impl Into<String>, values: Vec<String>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttrKind::Nominal,
            values,
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttrKind::Numeric,
            values: Vec::new(),
        }
    }

    /// Number of distinct nominal labels (0 for numeric columns).
    pub fn n_values(&self) -> usize {
        self.values.len()
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            AttrKind::Nominal => {
                if self.values.is_empty() {
                    return Err(Error::Schema(format!(
                        "nominal attribute {:?} declares no values",
                        self.name
                    )));
                }
                let mut seen = std::collections::HashSet::new();
                for v in &self.values {
                    if !seen.insert(v) {
                        return Err(Error::Schema(format!(
                            "nominal attribute {:?} declares duplicate value {v:?}",
                            self.name
                        )));
                    }
                }
            }
            AttrKind::Numeric => {
                if !self.values.is_empty() {
                    return Err(Error::Schema(format!(
                        "numeric attribute {:?} must not declare nominal values",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One stored cell: missing, a nominal value index, or a raw numeric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Missing,
    Idx(u32),
    Num(f64),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Nominal value index, if present.
    pub fn index(&self) -> Option<u32> {
        match self {
            Cell::Idx(v) => Some(*v),
            _ => None,
        }
    }

    pub fn number(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

/// Per-attribute discretization cut points, recorded so the exact transform
/// can be replayed on held-out data. `None` for originally-nominal columns.
pub type CutPoints = Vec<Option<Vec<f64>>>;

/// An immutable, column-typed classification dataset.
///
/// Instances are rows of predictive cells plus a class index. Subset and
/// masking operations produce new datasets that share the parent's schema,
/// so value indices remain comparable across splits.
#[derive(Debug)]
pub struct Dataset {
    attributes: Vec<AttributeSpec>,
    class_spec: AttributeSpec,
    rows: Vec<Vec<Cell>>,
    classes: Vec<u32>,
    /// Original row identity, preserved across subsetting/masking. Used by
    /// the harness to assert the train/test leakage ban.
    source_ids: Vec<usize>,
    /// Discretization cut points recorded by `discretize`, if any.
    cuts: Option<CutPoints>,
    /// Instrumentation: number of `row()` accesses since construction.
    row_reads: AtomicU64,
}

impl Clone for Dataset {
    fn clone(&self) -> Self {
        Dataset {
            attributes: self.attributes.clone(),
            class_spec: self.class_spec.clone(),
            rows: self.rows.clone(),
            classes: self.classes.clone(),
            source_ids: self.source_ids.clone(),
            cuts: self.cuts.clone(),
            row_reads: AtomicU64::new(0),
        }
    }
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.attributes == other.attributes
            && self.class_spec == other.class_spec
            && self.rows == other.rows
            && self.classes == other.classes
            && self.cuts == other.cuts
    }
}

impl Dataset {
    /// Assembles a dataset and checks every stored invariant: cell indices
    /// in range, cell kinds matching column kinds, and at least two class
    /// labels declared.
    pub fn new(
        attributes: Vec<AttributeSpec>,
        class_spec: AttributeSpec,
        rows: Vec<Vec<Cell>>,
        classes: Vec<u32>,
    ) -> Result<Self> {
        let source_ids = (0..rows.len()).collect();
        Self::with_source_ids(attributes, class_spec, rows, classes, source_ids, None)
    }

    fn with_source_ids(
        attributes: Vec<AttributeSpec>,
        class_spec: AttributeSpec,
        rows: Vec<Vec<Cell>>,
        classes: Vec<u32>,
        source_ids: Vec<usize>,
        cuts: Option<CutPoints>,
    ) -> Result<Self> {
        for spec in attributes.iter().chain(std::iter::once(&class_spec)) {
            spec.validate()?;
        }
        if class_spec.kind != AttrKind::Nominal {
            return Err(Error::Schema("class attribute must be nominal".into()));
        }
        if class_spec.n_values() < 2 {
            return Err(Error::Schema(format!(
                "class attribute {:?} must declare at least 2 labels",
                class_spec.name
            )));
        }
        if rows.len() != classes.len() || rows.len() != source_ids.len() {
            return Err(Error::Argument("row, class, and id lengths differ".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::Argument(format!(
                    "row {r} has {} cells, expected {}",
                    row.len(),
                    attributes.len()
                )));
            }
            for (a, cell) in row.iter().enumerate() {
                match (attributes[a].kind, cell) {
                    (_, Cell::Missing) => {}
                    (AttrKind::Nominal, Cell::Idx(v)) => {
                        if *v as usize >= attributes[a].n_values() {
                            return Err(Error::Schema(format!(
                                "row {r}: value index {v} out of range for attribute {:?}",
                                attributes[a].name
                            )));
                        }
                    }
                    (AttrKind::Numeric, Cell::Num(_)) => {}
                    (kind, cell) => {
                        return Err(Error::Schema(format!(
                            "row {r}: cell {cell:?} does not match {kind:?} attribute {:?}",
                            attributes[a].name
                        )));
                    }
                }
            }
            if classes[r] as usize >= class_spec.n_values() {
                return Err(Error::Schema(format!(
                    "row {r}: class index {} out of range",
                    classes[r]
                )));
            }
        }
        Ok(Dataset {
            attributes,
            class_spec,
            rows,
            classes,
            source_ids,
            cuts,
            row_reads: AtomicU64::new(0),
        })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn class_spec(&self) -> &AttributeSpec {
        &self.class_spec
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_instances(&self) -> usize {
        self.rows.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_spec.n_values()
    }

    /// Predictive cells of instance `i`. Counts as one instrumented row read.
    pub fn row(&self, i: usize) -> &[Cell] {
        self.row_reads.fetch_add(1, Ordering::Relaxed);
        &self.rows[i]
    }

    /// Class index of instance `i` (not counted as a row read).
    pub fn class_of(&self, i: usize) -> u32 {
        self.classes[i]
    }

    /// Original identity of instance `i` in the dataset it was loaded from.
    pub fn source_id(&self, i: usize) -> usize {
        self.source_ids[i]
    }

    /// Instrumented row-access count since construction (clones start at 0).
    pub fn row_reads(&self) -> u64 {
        self.row_reads.load(Ordering::Relaxed)
    }

    pub fn cut_points(&self) -> Option<&CutPoints> {
        self.cuts.as_ref()
    }

    /// True when every predictive attribute is nominal.
    pub fn all_nominal(&self) -> bool {
        self.attributes.iter().all(|a| a.kind == AttrKind::Nominal)
    }

    /// New dataset holding the given instances (by position), same schema.
    pub fn subset_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(indices.len());
        let mut classes = Vec::with_capacity(indices.len());
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.rows.len() {
                return Err(Error::Argument(format!("row index {i} out of range")));
            }
            rows.push(self.rows[i].clone());
            classes.push(self.classes[i]);
            ids.push(self.source_ids[i]);
        }
        Dataset::with_source_ids(
            self.attributes.clone(),
            self.class_spec.clone(),
            rows,
            classes,
            ids,
            self.cuts.clone(),
        )
    }

    /// Projects the dataset onto the attributes selected by `mask`,
    /// preserving attribute order, rows, and the class column.
    pub fn apply_mask(&self, mask: &FeatureMask) -> Result<Self> {
        if mask.len() != self.n_attributes() {
            return Err(Error::Argument(format!(
                "mask length {} does not match {} attributes",
                mask.len(),
                self.n_attributes()
            )));
        }
        if mask.cardinality() == 0 {
            return Err(Error::Argument("mask selects no attribute".into()));
        }
        let keep = mask.selected_indices();
        let attributes: Vec<AttributeSpec> =
            keep.iter().map(|&i| self.attributes[i].clone()).collect();
        let rows: Vec<Vec<Cell>> = self
            .rows
            .iter()
            .map(|row| keep.iter().map(|&i| row[i]).collect())
            .collect();
        let cuts = self
            .cuts
            .as_ref()
            .map(|c| keep.iter().map(|&i| c[i].clone()).collect());
        Dataset::with_source_ids(
            attributes,
            self.class_spec.clone(),
            rows,
            self.classes.clone(),
            self.source_ids.clone(),
            cuts,
        )
    }

    /// Replaces the cells and schema of numeric columns after binning.
    /// Internal helper for the discretizer.
    pub(crate) fn replace_columns(
        &self,
        attributes: Vec<AttributeSpec>,
        rows: Vec<Vec<Cell>>,
        cuts: CutPoints,
    ) -> Result<Self> {
        Dataset::with_source_ids(
            attributes,
            self.class_spec.clone(),
            rows,
            self.classes.clone(),
            self.source_ids.clone(),
            Some(cuts),
        )
    }

    /// Per-class instance counts under this dataset's class labels.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.n_classes()];
        for &c in &self.classes {
            h[c as usize] += 1;
        }
        h
    }
}

/// Free-function form of [`Dataset::apply_mask`].
pub fn apply_mask(dataset: &Dataset, mask: &FeatureMask) -> Result<Dataset> {
    dataset.apply_mask(mask)
}
