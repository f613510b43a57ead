//! Binary attribute masks used by the feature-selection search.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A length-`n` bit vector selecting a subset of predictive attributes.
///
/// A mask is never empty: construction rejects all-zero masks and the
/// evolutionary operators repair them before they escape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    /// Builds a mask from raw bits. Rejects masks with no set bit.
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.iter().all(|b| !b) {
            return Err(Error::Argument("feature mask selects no attribute".into()));
        }
        Ok(FeatureMask { bits })
    }

    /// The all-ones mask over `n` attributes.
    pub fn ones(n: usize) -> Self {
        assert!(n >= 1, "mask length must be positive");
        FeatureMask { bits: vec![true; n] }
    }

    /// Mask with exactly the given attribute indices set.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::Argument(format!("mask index {i} out of range for {n} attributes")));
            }
            bits[i] = true;
        }
        Self::from_bits(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of set bits.
    pub fn cardinality(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices of the selected attributes, ascending.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Compact `0`/`1` string, attribute 0 first.
    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Argument(format!("invalid mask character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::from_bits(bits)
    }
}

/// Lexicographic order on the bit string, attribute 0 most significant,
/// with 0 < 1. Used as the final determinism tie-break when selecting the
/// output mask.
impl Ord for FeatureMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a.cmp(b))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or_else(|| self.bits.len().cmp(&other.bits.len()))
    }
}

impl PartialOrd for FeatureMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}
