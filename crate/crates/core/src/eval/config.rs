use serde::{Deserialize, Serialize};

use crate::datagen::{ColumnSpec, QueryBatchSpec};
use crate::error::{Error, Result};

/// How to predict visits for an example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Uniform predictor on the source cardinalities. With
    /// `correct_correlation`, offset columns use their spread.
    Uniform {
        #[serde(default)]
        correct_correlation: bool,
    },
    /// Histogram predictor over the first column, with either its true pmf
    /// or, as a placebo, a uniform pmf over the same domain.
    Histogram {
        buckets: usize,
        #[serde(default)]
        placebo: bool,
    },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Uniform {
            correct_correlation: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedModel {
    pub name: String,
    pub model: ModelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleConfig {
    /// Group tag used when summarising, e.g. `k=7` or `bias=0.3`.
    #[serde(default)]
    pub label: String,
    pub columns: Vec<ColumnSpec>,
    pub rows: usize,
    pub seed: u64,
    pub queries: QueryBatchSpec,
    #[serde(default)]
    pub model: ModelSpec,
    /// Extra predictions reported next to the main one.
    #[serde(default)]
    pub alt_models: Vec<NamedModel>,
}

impl ExampleConfig {
    pub fn dims(&self) -> usize {
        self.columns.len()
    }

    pub fn validate(&self) -> Result<()> {
        crate::datagen::validate_specs(&self.columns)?;
        self.queries.validate()?;
        if self.queries.sel_range.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: self.queries.sel_range.len(),
            });
        }
        if self.rows == 0 {
            return Err(Error::EmptyRelation);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    /// Factor applied to the reference row and query counts.
    pub scale: f64,
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub examples: Vec<ExampleConfig>,
}

fn default_repetitions() -> usize {
    5
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        for (i, ex) in cfg.examples.iter().enumerate() {
            ex.validate().map_err(|e| e.in_example(i))?;
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Keeps only the examples with one of the given labels.
    pub fn select(mut self, labels: &[&str]) -> Self {
        self.examples.retain(|e| labels.contains(&e.label.as_str()));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let text = r#"{
            "name": "t", "scale": 1.0, "seed": 3,
            "examples": [{
                "columns": [{"kind": "uniform", "card": 5}, {"kind": "unique_key"}],
                "rows": 10, "seed": 1,
                "queries": {"n_queries": 4, "seed": 2,
                            "sel_range": [{"lo": 0.5, "hi": 1.0}, {"lo": 1.0, "hi": 1.0}]}
            }]
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.repetitions, 5);
        assert_eq!(cfg.examples[0].model, ModelSpec::default());
        assert!(!cfg.examples[0].queries.anchor_first);
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn invalid_example_names_its_index() {
        let text = r#"{
            "name": "t", "scale": 1.0, "seed": 3,
            "examples": [{
                "columns": [{"kind": "uniform", "card": 5}, {"kind": "unique_key"}],
                "rows": 10, "seed": 1,
                "queries": {"n_queries": 4, "seed": 2, "sel_range": [{"lo": 0.5, "hi": 1.0}]}
            }]
        }"#;
        assert!(matches!(
            ExperimentConfig::from_json(text),
            Err(Error::Example { index: 0, .. })
        ));
    }
}
