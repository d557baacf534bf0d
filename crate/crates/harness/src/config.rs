//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use microsob_core::conic::ConicRegionSet;
use microsob_core::indices::IndexHypotheses;
use microsob_core::product::ProductMode;
use microsob_core::{DistributionSpec, GridSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus;
use crate::suites;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub size: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dim: 1, size: 4096 }
    }
}

fn general() -> ProductMode {
    ProductMode::General
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Operation {
    /// Global order, order field, annulus profile and `WF^r` of one member.
    Analyze {
        member: String,
        #[serde(default)]
        r: Option<f64>,
    },
    /// Tensor seminorm bound for a pair of members, with the tensor order field in 1D×1D.
    Tensor { first: String, second: String },
    Multiply {
        first: String,
        second: String,
        hypotheses: String,
        #[serde(default = "general")]
        mode: ProductMode,
        /// Named conic sets; the catalog wave front of the member when absent.
        #[serde(default)]
        l1: Option<String>,
        #[serde(default)]
        l2: Option<String>,
        /// Gate on estimated wave fronts instead of catalog ones.
        #[serde(default)]
        estimate: bool,
        /// Error kind the product must be rejected with.
        #[serde(default)]
        expect_error: Option<String>,
    },
    /// A named suite, or `all`.
    VerifySuite { name: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub grid: GridConfig,
    /// Members by name; built-in corpus labels resolve without an entry.
    #[serde(default)]
    pub corpus: BTreeMap<String, DistributionSpec>,
    /// Conic sets in the region/cone JSON schema.
    #[serde(default)]
    pub conic_sets: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub hypotheses: BTreeMap<String, IndexHypotheses>,
    #[serde(default)]
    pub operations: Vec<Operation>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.grid.dim, self.grid.size)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn member(&self, name: &str) -> Result<DistributionSpec, ConfigError> {
        self.corpus
            .get(name)
            .cloned()
            .or_else(|| corpus::lookup(name))
            .ok_or_else(|| ConfigError::Invalid(format!("unknown corpus member {name:?}")))
    }

    pub fn conic_set(&self, name: &str) -> Result<ConicRegionSet, ConfigError> {
        let value = self
            .conic_sets
            .get(name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown conic set {name:?}")))?;
        ConicRegionSet::from_json(&value.to_string())
            .map_err(|e| ConfigError::Invalid(format!("conic set {name:?}: {e}")))
    }

    pub fn hypothesis(&self, name: &str) -> Result<IndexHypotheses, ConfigError> {
        self.hypotheses
            .get(name)
            .copied()
            .ok_or_else(|| ConfigError::Invalid(format!("unknown hypotheses {name:?}")))
    }

    /// Every name an operation refers to must resolve, and every member must fit the grid.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.grid_spec()?;
        for (name, h) in &self.hypotheses {
            h.validate()
                .map_err(|e| ConfigError::Invalid(format!("hypotheses {name:?}: {e}")))?;
        }
        for name in self.conic_sets.keys() {
            self.conic_set(name)?;
        }
        let member_on_grid = |name: &str, dim: usize| -> Result<(), ConfigError> {
            let spec = self.member(name)?;
            if spec.dim() != dim {
                return Err(ConfigError::Invalid(format!(
                    "member {name:?} is {}-dimensional, expected {dim}",
                    spec.dim()
                )));
            }
            Ok(())
        };
        for op in &self.operations {
            match op {
                Operation::Analyze { member, .. } => member_on_grid(member, grid.dim())?,
                Operation::Tensor { first, second } => {
                    member_on_grid(first, grid.dim())?;
                    member_on_grid(second, grid.dim())?;
                    if 2 * grid.dim() > 4 {
                        return Err(ConfigError::Invalid("tensor products need dim <= 2".into()));
                    }
                }
                Operation::Multiply {
                    first,
                    second,
                    hypotheses,
                    l1,
                    l2,
                    ..
                } => {
                    member_on_grid(first, grid.dim())?;
                    member_on_grid(second, grid.dim())?;
                    let h = self.hypothesis(hypotheses)?;
                    if h.m != grid.dim() {
                        return Err(ConfigError::Invalid(format!(
                            "hypotheses {hypotheses:?} are for m = {}, grid has dim {}",
                            h.m,
                            grid.dim()
                        )));
                    }
                    for set in [l1, l2].into_iter().flatten() {
                        self.conic_set(set)?;
                    }
                }
                Operation::VerifySuite { name } => {
                    if name != "all" && suites::find(name).is_none() {
                        return Err(ConfigError::Invalid(format!(
                            "unknown suite {name:?}; known: {}",
                            suites::names().join(", ")
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_a_valid_config() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert!(cfg.operations.is_empty());
        assert_eq!(cfg.grid, GridConfig::default());
    }

    #[test]
    fn unknown_fields_and_names_are_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"grid_size": 4}"#),
            Err(ConfigError::Parse(_))
        ));
        let bad = r#"{"operations": [{"op": "analyze", "member": "cantor"}]}"#;
        assert!(matches!(
            ExperimentConfig::from_json(bad),
            Err(ConfigError::Invalid(_))
        ));
        let bad = r#"{"operations": [{"op": "verify_suite", "name": "nope"}]}"#;
        assert!(matches!(
            ExperimentConfig::from_json(bad),
            Err(ConfigError::Invalid(_))
        ));
        let bad = r#"{"corpus": {"x": {"kind": "sawtooth"}}}"#;
        assert!(matches!(
            ExperimentConfig::from_json(bad),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn multiply_operation_round_trips() {
        let text = r#"{
            "grid": {"dim": 1, "size": 256},
            "hypotheses": {"h": {"r_prime": 1, "r_double_prime": 1, "r1": 4, "r2": 4, "m": 1}},
            "operations": [{"op": "multiply", "first": "delta", "second": "heaviside", "hypotheses": "h",
                            "expect_error": "TransversalityViolated"}]
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        match &cfg.operations[0] {
            Operation::Multiply { mode, estimate, .. } => {
                assert_eq!((*mode, *estimate), (ProductMode::General, false))
            }
            other => panic!("{other:?}"),
        }
    }
}
