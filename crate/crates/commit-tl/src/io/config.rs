//! The analysis configuration file: a single JSON document with dotted-path
//! overrides from the command line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{DfConvention, VarianceMethod, ZetaChoice};
use crate::io::table::Orientation;
use crate::solver::LambdaRule;

/// Which metabolite columns form the candidate/auxiliary pool.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Candidates {
    /// The literal string "all": every outcome except the target.
    All(String),
    Named(Vec<String>),
}

impl Default for Candidates {
    fn default() -> Self {
        Candidates::All("all".to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct TransformConfig {
    /// Apply the centered log-ratio transform to the microbe table.
    pub clr: bool,
    pub pseudocount: f64,
    /// Log-transform the metabolite table.
    pub log: bool,
    pub offset: f64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self { clr: true, pseudocount: 0.5, log: true, offset: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SelectionParams {
    pub r0: f64,
    pub p0: f64,
    pub k_folds: usize,
    pub seed: u64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self { r0: 0.5, p0: 0.05, k_folds: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct InferenceParams {
    pub alpha: f64,
    pub df: DfConvention,
    pub variance: VarianceMethod,
    pub zeta: ZetaChoice,
    pub seed: u64,
}

impl Default for InferenceParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            df: DfConvention::N,
            variance: VarianceMethod::Natural,
            zeta: ZetaChoice::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SolverParams {
    pub n_lambda: usize,
    pub lambda_min_ratio: Option<f64>,
    pub cv_folds: usize,
    pub lambda_rule: LambdaRule,
    pub tol: f64,
    pub max_sweeps: usize,
    pub intercept: bool,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            n_lambda: 100,
            lambda_min_ratio: None,
            cv_folds: 5,
            lambda_rule: LambdaRule::Min,
            tol: 1e-7,
            max_sweeps: 10_000,
            intercept: true,
            seed: 0,
        }
    }
}

/// The full analysis configuration consumed by `select-aux`, `fit`, and
/// `infer`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub microbe_csv: String,
    pub metabolite_csv: String,
    #[serde(default)]
    pub orientation: Orientation,
    pub target: String,
    #[serde(default)]
    pub candidates: Candidates,
    #[serde(default)]
    pub transform: TransformConfig,
    #[serde(default)]
    pub selection: SelectionParams,
    #[serde(default)]
    pub inference: InferenceParams,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    ".".to_string()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target.is_empty() {
            return Err(Error::Config("target outcome name is empty".into()));
        }
        if let Candidates::All(tag) = &self.candidates {
            if tag != "all" {
                return Err(Error::Config(format!(
                    "candidates must be \"all\" or a list of names, got {tag:?}"
                )));
            }
        }
        if self.transform.clr && self.transform.pseudocount < 0.0 {
            return Err(Error::Config("pseudocount must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Applies one `key.path=value` override to a JSON document. The value is
/// parsed as JSON when possible, otherwise taken as a string.
fn apply_override(doc: &mut serde_json::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| {
        Error::Config(format!("override {spec:?} is not of the form key.path=value"))
    })?;
    let value: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Config(format!("override {spec:?} has an empty path segment")));
        }
        if !cursor.is_object() {
            return Err(Error::Config(format!(
                "override {spec:?}: {} is not an object",
                parts[..i].join(".")
            )));
        }
        let map = cursor.as_object_mut().expect("checked above");
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cursor = map
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("loop always returns on the last segment")
}

/// Reads a JSON config file and applies `--set` overrides before typed
/// deserialization.
pub fn load_json_config<T: serde::de::DeserializeOwned>(
    path: &Path,
    overrides: &[String],
) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let mut doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!("{}: {e}", path.display()))
    })?;
    for spec in overrides {
        apply_override(&mut doc, spec)?;
    }
    serde_json::from_value(doc).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
