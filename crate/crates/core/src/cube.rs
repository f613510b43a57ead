//! Joint frequency tables filled in a single sequential training pass.
//!
//! The cube stores, over nominal attributes:
//!   * `class_counts`  — F(y)
//!   * `joint2`        — F(y, xᵢ = v)
//!   * `joint3`        — F(y, xᵢ = v, xⱼ = w), symmetric pair space (i < j)
//! plus the non-missing row counts needed by the smoothed estimators.
//! Missing cells contribute to no count involving their attribute.

use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyCube {
    n_classes: usize,
    /// Declared value count v_i per attribute.
    values: Vec<usize>,
    /// F(y), length n_classes.
    class_counts: Vec<u64>,
    /// F(y, x_i = v): index `y * sum_v + off2[i] + v`.
    joint2: Vec<u64>,
    off2: Vec<usize>,
    sum_v: usize,
    /// Rows where attribute i is non-missing (K_i).
    attr_seen: Vec<u64>,
    /// Rows with class y where attribute i is non-missing: index `y * n + i`.
    seen_by_class: Vec<u64>,
    /// Total training rows K.
    n_seen: u64,
    /// F(y, x_i = v, x_j = w) for i < j:
    /// index `y * pair_block + off3[pair(i,j)] + v * values[j] + w`.
    joint3: Vec<u64>,
    off3: Vec<usize>,
    pair_block: usize,
    /// Denominator bases Σ_w F(y, x_i = v, x_j = w) for every ordered pair
    /// (i, j), i ≠ j: index `y * base_block + off_base[ordered(i,j)] + v`.
    /// Derived from `joint3` after counting; kept so prediction avoids a
    /// sum over child values on every conditional.
    base3: Vec<u64>,
    off_base: Vec<usize>,
    base_block: usize,
}

impl FrequencyCube {
    /// Counts `train` in one sequential pass. `with_pairs` controls whether
    /// the 3-D table is materialized (naive Bayes needs only the marginals).
    pub fn fit(train: &Dataset, with_pairs: bool) -> Result<Self> {
        if train.n_instances() == 0 {
            return Err(Error::EmptyDataset("cannot fit on zero instances".into()));
        }
        if !train.all_nominal() {
            return Err(Error::Schema(
                "all attributes must be nominal; discretize numeric columns first".into(),
            ));
        }

        let mut cube = Self::empty(
            train.n_classes(),
            train.attributes().iter().map(|a| a.n_values()).collect(),
            with_pairs,
        );
        for r in 0..train.n_instances() {
            let row = train.row(r); // exactly one read per training row
            cube.count_row(row, train.class_of(r) as usize);
        }
        cube.rebuild_base();
        Ok(cube)
    }

    pub fn empty(n_classes: usize, values: Vec<usize>, with_pairs: bool) -> Self {
        let n = values.len();
        let mut off2 = Vec::with_capacity(n);
        let mut sum_v = 0usize;
        for &v in &values {
            off2.push(sum_v);
            sum_v += v;
        }

        let mut off3 = Vec::new();
        let mut pair_block = 0usize;
        let mut off_base = Vec::new();
        let mut base_block = 0usize;
        if with_pairs {
            off3.reserve(n.saturating_sub(1) * n / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    off3.push(pair_block);
                    pair_block += values[i] * values[j];
                }
            }
            off_base.reserve(n.saturating_sub(1) * n);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    off_base.push(base_block);
                    base_block += values[i];
                }
            }
        }

        FrequencyCube {
            n_classes,
            class_counts: vec![0; n_classes],
            joint2: vec![0; n_classes * sum_v],
            off2,
            sum_v,
            attr_seen: vec![0; n],
            seen_by_class: vec![0; n_classes * n],
            n_seen: 0,
            joint3: vec![0; n_classes * pair_block],
            off3,
            pair_block,
            base3: vec![0; n_classes * base_block],
            off_base,
            base_block,
            values,
        }
    }

    /// Rebuilds the ordered-pair denominator bases from `joint3`.
    fn rebuild_base(&mut self) {
        if self.base_block == 0 {
            return;
        }
        let n = self.values.len();
        for y in 0..self.n_classes {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let op = self.ordered_pair_index(i, j);
                    for v in 0..self.values[i] {
                        let total: u64 =
                            (0..self.values[j]).map(|w| self.joint3(y, i, v, j, w)).sum();
                        self.base3[y * self.base_block + self.off_base[op] + v] = total;
                    }
                }
            }
        }
    }

    #[inline]
    fn ordered_pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j);
        let n = self.values.len();
        i * (n - 1) + if j > i { j - 1 } else { j }
    }

    fn count_row(&mut self, row: &[Cell], y: usize) {
        let n = self.values.len();
        debug_assert_eq!(row.len(), n);
        self.class_counts[y] += 1;
        self.n_seen += 1;
        for i in 0..n {
            let Some(v) = row[i].index() else { continue };
            let v = v as usize;
            self.joint2[y * self.sum_v + self.off2[i] + v] += 1;
            self.attr_seen[i] += 1;
            self.seen_by_class[y * n + i] += 1;
            if self.pair_block > 0 {
                for j in (i + 1)..n {
                    let Some(w) = row[j].index() else { continue };
                    let idx = y * self.pair_block
                        + self.off3[self.pair_index(i, j)]
                        + v * self.values[j]
                        + w as usize;
                    self.joint3[idx] += 1;
                }
            }
        }
    }

    /// Elementwise addition of a cube with identical shape. Counts are
    /// additive, so sharded fits merged this way equal a single-pass fit.
    pub fn merge(&mut self, other: &FrequencyCube) -> Result<()> {
        if self.values != other.values || self.n_classes != other.n_classes
            || self.pair_block != other.pair_block
        {
            return Err(Error::Argument("cannot merge cubes of different shapes".into()));
        }
        for (a, b) in self.class_counts.iter_mut().zip(&other.class_counts) {
            *a += b;
        }
        for (a, b) in self.joint2.iter_mut().zip(&other.joint2) {
            *a += b;
        }
        for (a, b) in self.joint3.iter_mut().zip(&other.joint3) {
            *a += b;
        }
        for (a, b) in self.attr_seen.iter_mut().zip(&other.attr_seen) {
            *a += b;
        }
        for (a, b) in self.seen_by_class.iter_mut().zip(&other.seen_by_class) {
            *a += b;
        }
        self.n_seen += other.n_seen;
        self.rebuild_base();
        Ok(())
    }

    #[inline]
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        let n = self.values.len();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_attributes(&self) -> usize {
        self.values.len()
    }

    /// Declared value count v_i.
    pub fn n_values(&self, i: usize) -> usize {
        self.values[i]
    }

    /// F(y).
    pub fn class_count(&self, y: usize) -> u64 {
        self.class_counts[y]
    }

    /// Total training rows K.
    pub fn n_seen(&self) -> u64 {
        self.n_seen
    }

    /// K_i: rows where attribute i is non-missing.
    pub fn attr_seen(&self, i: usize) -> u64 {
        self.attr_seen[i]
    }

    /// Rows with class y where attribute i is non-missing.
    pub fn seen_by_class(&self, y: usize, i: usize) -> u64 {
        self.seen_by_class[y * self.values.len() + i]
    }

    /// F(y, x_i = v).
    pub fn joint2(&self, y: usize, i: usize, v: usize) -> u64 {
        self.joint2[y * self.sum_v + self.off2[i] + v]
    }

    /// F(x_i = v) marginalized over classes; parent-eligibility count.
    pub fn value_count(&self, i: usize, v: usize) -> u64 {
        (0..self.n_classes).map(|y| self.joint2(y, i, v)).sum()
    }

    /// F(y, x_i = v, x_j = w); symmetric access over the i < j storage.
    pub fn joint3(&self, y: usize, i: usize, v: usize, j: usize, w: usize) -> u64 {
        debug_assert!(i != j);
        let idx = if i < j {
            y * self.pair_block + self.off3[self.pair_index(i, j)] + v * self.values[j] + w
        } else {
            y * self.pair_block + self.off3[self.pair_index(j, i)] + w * self.values[i] + v
        };
        self.joint3[idx]
    }

    /// F(y, x_i = v) restricted to rows where x_j is also non-missing:
    /// the denominator base of the smoothed conditional.
    pub fn joint3_base(&self, y: usize, i: usize, v: usize, j: usize) -> u64 {
        self.base3[y * self.base_block + self.off_base[self.ordered_pair_index(i, j)] + v]
    }

    /// Total stored cells of the joint frequency tables:
    /// `m·Σ_{i<j} v_i·v_j + m·Σ_i v_i + m`. The derived denominator cache is
    /// not part of the count — it carries no information beyond `joint3`.
    pub fn cell_count(&self) -> usize {
        self.joint3.len() + self.joint2.len() + self.class_counts.len()
    }

    /// Shape consistency check used after deserialization.
    pub fn validate_shape(&self) -> Result<()> {
        let n = self.values.len();
        let mut off2 = Vec::with_capacity(n);
        let mut sum_v = 0usize;
        for &v in &self.values {
            off2.push(sum_v);
            sum_v += v;
        }
        let with_pairs = !self.off3.is_empty() || self.pair_block > 0;
        let mut off3 = Vec::new();
        let mut pair_block = 0usize;
        let mut off_base = Vec::new();
        let mut base_block = 0usize;
        if with_pairs {
            for i in 0..n {
                for j in (i + 1)..n {
                    off3.push(pair_block);
                    pair_block += self.values[i] * self.values[j];
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    off_base.push(base_block);
                    base_block += self.values[i];
                }
            }
        }
        let ok = self.off2 == off2
            && self.sum_v == sum_v
            && self.off3 == off3
            && self.pair_block == pair_block
            && self.off_base == off_base
            && self.base_block == base_block
            && self.class_counts.len() == self.n_classes
            && self.joint2.len() == self.n_classes * sum_v
            && self.joint3.len() == self.n_classes * pair_block
            && self.base3.len() == self.n_classes * base_block
            && self.attr_seen.len() == n
            && self.seen_by_class.len() == self.n_classes * n
            && self.class_counts.iter().sum::<u64>() == self.n_seen;
        if !ok {
            return Err(Error::Serialization("frequency cube shape is inconsistent".into()));
        }
        // the denominator cache must match its defining sums
        let mut expected = self.clone();
        expected.rebuild_base();
        if expected.base3 != self.base3 {
            return Err(Error::Serialization(
                "frequency cube denominator cache is inconsistent".into(),
            ));
        }
        Ok(())
    }
}
