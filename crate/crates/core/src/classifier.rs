//! Naive Bayes and averaged one-dependence estimation on frequency cubes.
//!
//! Both models are pure functions of their training counts: fitting is a
//! single sequential pass that fills a [`FrequencyCube`], prediction reads
//! the cube through Laplace-smoothed estimators. Scores accumulate in the
//! log domain with a per-class max subtraction before normalization, and
//! argmax ties break toward the lowest class index.

use serde::{Deserialize, Serialize};

use crate::cube::FrequencyCube;
use crate::dataset::{AttrKind, AttributeSpec, Cell, Dataset};
use crate::error::{Error, Result};

const MODEL_FORMAT_VERSION: u32 = 1;

/// A normalized probability distribution over class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    probabilities: Vec<f64>,
}

impl ClassDistribution {
    /// Normalizes non-negative scores. At least one score must be positive.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let sum: f64 = scores.iter().sum();
        assert!(
            sum > 0.0 && scores.iter().all(|&s| s >= 0.0),
            "scores must be non-negative with a positive sum"
        );
        ClassDistribution {
            probabilities: scores.into_iter().map(|s| s / sum).collect(),
        }
    }

    /// Exponentiates log scores after subtracting the maximum, then
    /// normalizes. This is the only path the classifiers use.
    pub fn from_log_scores(log_scores: Vec<f64>) -> Self {
        let max = log_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scores: Vec<f64> = log_scores.into_iter().map(|s| (s - max).exp()).collect();
        ClassDistribution::from_scores(scores)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Index of the most probable class; ties break to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate().skip(1) {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }
}

/// Attribute and class declarations a model was fitted under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSchema {
    pub attributes: Vec<AttributeSpec>,
    pub class_spec: AttributeSpec,
}

impl ModelSchema {
    fn of(dataset: &Dataset) -> Self {
        ModelSchema {
            attributes: dataset.attributes().to_vec(),
            class_spec: dataset.class_spec().clone(),
        }
    }

    fn check_instance(&self, instance: &[Cell]) -> Result<()> {
        if instance.len() != self.attributes.len() {
            return Err(Error::Argument(format!(
                "instance has {} cells, model expects {}",
                instance.len(),
                self.attributes.len()
            )));
        }
        for (a, cell) in instance.iter().enumerate() {
            match cell {
                Cell::Missing => {}
                Cell::Idx(v) => {
                    if *v as usize >= self.attributes[a].n_values() {
                        return Err(Error::Schema(format!(
                            "value index {v} out of range for attribute {:?}",
                            self.attributes[a].name
                        )));
                    }
                }
                Cell::Num(_) => {
                    return Err(Error::Schema(format!(
                        "attribute {:?}: numeric cell passed to a nominal model",
                        self.attributes[a].name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Naive Bayes: class prior times per-attribute conditionals, all from
/// smoothed marginal counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    cube: FrequencyCube,
    schema: ModelSchema,
    smoothing: u64,
}

/// Averaged one-dependence estimation: every eligible non-missing attribute
/// acts once as a super-parent, and the per-parent models are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AodeModel {
    cube: FrequencyCube,
    schema: ModelSchema,
    m_threshold: u64,
    smoothing: u64,
}

/// Fits the one-dependence model. `m_threshold` is the minimum training
/// frequency a parent value needs before its model joins the average.
pub fn fit_aode(train: &Dataset, m_threshold: u64) -> Result<AodeModel> {
    if m_threshold < 1 {
        return Err(Error::Argument("m_threshold must be a positive integer".into()));
    }
    Ok(AodeModel {
        cube: FrequencyCube::fit(train, true)?,
        schema: ModelSchema::of(train),
        m_threshold,
        smoothing: 1,
    })
}

/// Fits plain naive Bayes (marginal counts only; no 3-D table).
pub fn fit_nb(train: &Dataset) -> Result<NbModel> {
    Ok(NbModel {
        cube: FrequencyCube::fit(train, false)?,
        schema: ModelSchema::of(train),
        smoothing: 1,
    })
}

impl AodeModel {
    pub fn cube(&self) -> &FrequencyCube {
        &self.cube
    }

    pub fn schema(&self) -> &ModelSchema {
        &self.schema
    }

    pub fn m_threshold(&self) -> u64 {
        self.m_threshold
    }

    /// P̂(y, xᵢ = v) = (F(y,i,v) + s) / (K_i + s·m·v_i); strictly inside (0,1).
    pub fn smoothed_class_joint(&self, y: usize, i: usize, v: usize) -> f64 {
        let s = self.smoothing as f64;
        let m = self.cube.n_classes() as f64;
        let vi = self.cube.n_values(i) as f64;
        (self.cube.joint2(y, i, v) as f64 + s) / (self.cube.attr_seen(i) as f64 + s * m * vi)
    }

    /// P̂(xⱼ = w | y, xᵢ = v) = (F(y,i,v,j,w) + s) / (base + s·v_j), where
    /// base counts rows with class y, xᵢ = v, and xⱼ non-missing. An unseen
    /// parent context therefore falls back to the uniform 1/v_j.
    pub fn smoothed_conditional(&self, j: usize, w: usize, y: usize, i: usize, v: usize) -> f64 {
        debug_assert!(i != j);
        let s = self.smoothing as f64;
        let vj = self.cube.n_values(j) as f64;
        let base = self.cube.joint3_base(y, i, v, j) as f64;
        (self.cube.joint3(y, i, v, j, w) as f64 + s) / (base + s * vj)
    }

    /// Smoothed class prior, used by the naive-Bayes fallback.
    pub fn smoothed_prior(&self, y: usize) -> f64 {
        let s = self.smoothing as f64;
        let m = self.cube.n_classes() as f64;
        (self.cube.class_count(y) as f64 + s) / (self.cube.n_seen() as f64 + s * m)
    }

    /// Predicts a class distribution for one instance (cells may be missing).
    pub fn predict(&self, instance: &[Cell]) -> Result<ClassDistribution> {
        let attrs: Vec<usize> = (0..self.schema.attributes.len()).collect();
        self.predict_with_attrs(instance, &attrs)
    }

    /// Predicts using only the attributes listed in `attrs` (both as parents
    /// and as children). Because pair and marginal counts over an attribute
    /// subset are unaffected by the other attributes' presence, this equals
    /// fitting on the masked dataset and predicting the masked instance.
    pub fn predict_with_attrs(&self, instance: &[Cell], attrs: &[usize]) -> Result<ClassDistribution> {
        self.schema.check_instance(instance)?;
        let m = self.cube.n_classes();

        // Eligible super-parents: non-missing, with sufficiently frequent value.
        let parents: Vec<(usize, usize)> = attrs
            .iter()
            .filter_map(|&i| instance[i].index().map(|v| (i, v as usize)))
            .filter(|&(i, v)| self.cube.value_count(i, v) >= self.m_threshold)
            .collect();

        if parents.is_empty() {
            // Fall back to naive Bayes over the same counts.
            let scores = nb_log_scores(&self.cube, self.smoothing, instance, attrs);
            return Ok(ClassDistribution::from_log_scores(scores));
        }

        let ln_parents = (parents.len() as f64).ln();
        let mut log_scores = Vec::with_capacity(m);
        for y in 0..m {
            let terms: Vec<f64> = parents
                .iter()
                .map(|&(i, v)| {
                    let mut t = self.smoothed_class_joint(y, i, v).ln();
                    for &j in attrs {
                        if j == i {
                            continue;
                        }
                        if let Some(w) = instance[j].index() {
                            t += self.smoothed_conditional(j, w as usize, y, i, v).ln();
                        }
                    }
                    t
                })
                .collect();
            log_scores.push(log_sum_exp(&terms) - ln_parents);
        }
        Ok(ClassDistribution::from_log_scores(log_scores))
    }

    pub fn to_json(&self) -> String {
        let dump = ModelDump {
            format: "aode-model".to_string(),
            version: MODEL_FORMAT_VERSION,
            m_threshold: Some(self.m_threshold),
            smoothing: self.smoothing,
            schema: self.schema.clone(),
            cube: self.cube.clone(),
        };
        serde_json::to_string(&dump).expect("model serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: ModelDump = serde_json::from_str(text)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        dump.validate("aode-model")?;
        Ok(AodeModel {
            m_threshold: dump
                .m_threshold
                .ok_or_else(|| Error::Serialization("missing m_threshold".into()))?,
            smoothing: dump.smoothing,
            schema: dump.schema,
            cube: dump.cube,
        })
    }
}

impl NbModel {
    pub fn cube(&self) -> &FrequencyCube {
        &self.cube
    }

    pub fn schema(&self) -> &ModelSchema {
        &self.schema
    }

    pub fn predict(&self, instance: &[Cell]) -> Result<ClassDistribution> {
        let attrs: Vec<usize> = (0..self.schema.attributes.len()).collect();
        self.predict_with_attrs(instance, &attrs)
    }

    /// Naive Bayes restricted to an attribute subset; see
    /// [`AodeModel::predict_with_attrs`] for why this equals a masked refit.
    pub fn predict_with_attrs(&self, instance: &[Cell], attrs: &[usize]) -> Result<ClassDistribution> {
        self.schema.check_instance(instance)?;
        let scores = nb_log_scores(&self.cube, self.smoothing, instance, attrs);
        Ok(ClassDistribution::from_log_scores(scores))
    }

    pub fn to_json(&self) -> String {
        let dump = ModelDump {
            format: "nb-model".to_string(),
            version: MODEL_FORMAT_VERSION,
            m_threshold: None,
            smoothing: self.smoothing,
            schema: self.schema.clone(),
            cube: self.cube.clone(),
        };
        serde_json::to_string(&dump).expect("model serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: ModelDump = serde_json::from_str(text)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        dump.validate("nb-model")?;
        Ok(NbModel {
            smoothing: dump.smoothing,
            schema: dump.schema,
            cube: dump.cube,
        })
    }
}

/// Shared naive-Bayes scorer:
/// ln P̂(y) + Σ_j ln (F(y,j,w) + s) / (rows with class y and x_j present + s·v_j).
fn nb_log_scores(cube: &FrequencyCube, smoothing: u64, instance: &[Cell], attrs: &[usize]) -> Vec<f64> {
    let s = smoothing as f64;
    let m = cube.n_classes();
    (0..m)
        .map(|y| {
            let prior =
                (cube.class_count(y) as f64 + s) / (cube.n_seen() as f64 + s * m as f64);
            let mut score = prior.ln();
            for &j in attrs {
                if let Some(w) = instance[j].index() {
                    let vj = cube.n_values(j) as f64;
                    let p = (cube.joint2(y, j, w as usize) as f64 + s)
                        / (cube.seen_by_class(y, j) as f64 + s * vj);
                    score += p.ln();
                }
            }
            score
        })
        .collect()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Serialize, Deserialize)]
struct ModelDump {
    format: String,
    version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_threshold: Option<u64>,
    smoothing: u64,
    schema: ModelSchema,
    cube: FrequencyCube,
}

impl ModelDump {
    fn validate(&self, expected_format: &str) -> Result<()> {
        if self.format != expected_format {
            return Err(Error::Serialization(format!(
                "unexpected model format {:?}",
                self.format
            )));
        }
        if self.version != MODEL_FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported model version {} (expected {MODEL_FORMAT_VERSION})",
                self.version
            )));
        }
        self.cube.validate_shape()?;
        if self.schema.attributes.len() != self.cube.n_attributes()
            || self.schema.class_spec.n_values() != self.cube.n_classes()
            || self
                .schema
                .attributes
                .iter()
                .enumerate()
                .any(|(i, a)| a.kind != AttrKind::Nominal || a.n_values() != self.cube.n_values(i))
        {
            return Err(Error::Serialization("schema does not match cube shape".into()));
        }
        Ok(())
    }
}
