//! Result documents written by the command-line tool.
//!
//! Every document is JSON with a `kind` tag and a trailing `meta` object.
//! Everything outside `meta` is a pure function of the inputs and seed;
//! wall-clock measurements and other nondeterministic context live only in
//! `meta`, so two runs of the same command agree byte for byte elsewhere.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::DroppedAux;
use crate::inference::{DfConvention, VarianceMethod};
use crate::sim::SimulationReport;

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
pub struct Meta {
    /// Wall-clock duration of the command, milliseconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    /// Rows dropped by complete-case filtering.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped_rows: Option<usize>,
    /// Extra context (per-method runtimes and the like).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<serde_json::Value>,
}

/// Output of `fit`: the composed estimator with named coefficients.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FitDocument {
    pub kind: String,
    pub target: String,
    /// Names of the retained auxiliaries, in retained order.
    pub auxiliaries: Vec<String>,
    /// Combination weight per retained auxiliary.
    pub alpha: Vec<f64>,
    pub aux_lambdas: Vec<f64>,
    pub correction_lambda: f64,
    pub dropped: Vec<DroppedAuxNamed>,
    pub no_auxiliaries: bool,
    pub intercept: f64,
    pub features: Vec<String>,
    /// The target coefficient vector.
    pub coefficients: Vec<f64>,
    /// The sparse correction component.
    pub correction: Vec<f64>,
    pub meta: Meta,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DroppedAuxNamed {
    pub name: String,
    #[serde(flatten)]
    pub dropped: DroppedAux,
}

/// Output of `infer`: the per-feature table behind a volcano plot.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InferenceDocument {
    pub kind: String,
    pub target: String,
    pub auxiliaries: Vec<String>,
    pub n: usize,
    pub alpha_level: f64,
    pub df: DfConvention,
    pub variance_method: VarianceMethod,
    pub sigma0_hat: f64,
    pub eta_max: f64,
    pub features: Vec<String>,
    /// Point estimate of the composed fit (before debiasing).
    pub coefficient: Vec<f64>,
    pub debiased: Vec<f64>,
    pub se: Vec<f64>,
    pub p_value: Vec<f64>,
    pub p_adjusted: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
    pub meta: Meta,
}

impl InferenceDocument {
    /// The same table as comma-separated values, one row per feature.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "feature,coefficient,debiased_estimate,se,p_value,p_adjusted,ci_lower,ci_upper\n",
        );
        for i in 0..self.features.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.features[i],
                self.coefficient[i],
                self.debiased[i],
                self.se[i],
                self.p_value[i],
                self.p_adjusted[i],
                self.ci_lower[i],
                self.ci_upper[i]
            )
            .expect("string write cannot fail");
        }
        out
    }
}

/// Output of `select-aux`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SelectionDocument {
    pub kind: String,
    pub target: String,
    pub candidates: Vec<String>,
    pub r_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub r0: f64,
    pub p0: f64,
    pub folds: usize,
    /// Screened candidate names, strongest first.
    pub screened: Vec<String>,
    pub mse_by_m: Vec<f64>,
    pub m_opt: usize,
    pub selected: Vec<String>,
    pub warnings: Vec<String>,
    pub meta: Meta,
}

/// Output of `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationDocument {
    pub kind: String,
    pub report: SimulationReport,
    pub meta: Meta,
}

impl SimulationDocument {
    /// Long-format per-replication records: one row per (replication, method).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "replication,stream,method,mse,null_tests,null_rejections,\
             nonnull_tests,nonnull_rejections,sigma0_sq\n",
        );
        let streams = &self.report.replication_streams;
        for summary in &self.report.methods {
            let n_completed = summary.mse.len();
            let null_per_rep = summary.null_tests / n_completed.max(1);
            let nonnull_per_rep = summary.nonnull_tests / n_completed.max(1);
            for idx in 0..n_completed {
                let inference = !summary.null_rejections_by_rep.is_empty();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    idx,
                    streams[idx],
                    summary.method.name(),
                    summary.mse[idx],
                    if inference { null_per_rep.to_string() } else { String::new() },
                    if inference {
                        summary.null_rejections_by_rep[idx].to_string()
                    } else {
                        String::new()
                    },
                    if inference { nonnull_per_rep.to_string() } else { String::new() },
                    if inference {
                        summary.nonnull_rejections_by_rep[idx].to_string()
                    } else {
                        String::new()
                    },
                    summary
                        .sigma0_sq
                        .get(idx)
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                )
                .expect("string write cannot fail");
            }
        }
        out
    }
}

/// Serializes a document to pretty JSON with a trailing newline.
pub fn to_json_bytes<T: Serialize>(doc: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Renders a human-readable summary of any result document.
pub fn render_report(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Config(format!("{}: no \"kind\" field", path.display())))?
        .to_string();
    let mut out = String::new();
    match kind.as_str() {
        "fit" => {
            let doc: FitDocument = serde_json::from_value(value)?;
            writeln!(out, "Fit of target {:?}", doc.target).unwrap();
            if doc.no_auxiliaries {
                writeln!(out, "  no auxiliaries: plain lasso fit").unwrap();
            }
            for (i, name) in doc.auxiliaries.iter().enumerate() {
                writeln!(
                    out,
                    "  auxiliary {name}: weight {:+.4} (lambda {:.4})",
                    doc.alpha[i], doc.aux_lambdas[i]
                )
                .unwrap();
            }
            for d in &doc.dropped {
                writeln!(out, "  dropped {:?}: {:?}", d.name, d.dropped.reason).unwrap();
            }
            writeln!(out, "  correction lambda {:.5}", doc.correction_lambda).unwrap();
            writeln!(out, "  intercept {:+.5}", doc.intercept).unwrap();
            let nnz = doc.coefficients.iter().filter(|v| **v != 0.0).count();
            writeln!(out, "  {} of {} coefficients nonzero:", nnz, doc.coefficients.len())
                .unwrap();
            let mut by_size: Vec<usize> = (0..doc.coefficients.len())
                .filter(|&i| doc.coefficients[i] != 0.0)
                .collect();
            by_size.sort_by(|&a, &b| {
                doc.coefficients[b].abs().partial_cmp(&doc.coefficients[a].abs()).unwrap()
            });
            for &i in by_size.iter().take(15) {
                writeln!(out, "    {:30} {:+.5}", doc.features[i], doc.coefficients[i]).unwrap();
            }
            if by_size.len() > 15 {
                writeln!(out, "    ... {} more", by_size.len() - 15).unwrap();
            }
        }
        "inference" => {
            let doc: InferenceDocument = serde_json::from_value(value)?;
            writeln!(out, "Inference for target {:?} (n = {})", doc.target, doc.n).unwrap();
            writeln!(
                out,
                "  noise sd {:.4} ({:?}), max bias factor {:.3}",
                doc.sigma0_hat, doc.variance_method, doc.eta_max
            )
            .unwrap();
            let hits: Vec<usize> = (0..doc.features.len())
                .filter(|&i| doc.p_value[i] < doc.alpha_level)
                .collect();
            let fdr_hits =
                (0..doc.features.len()).filter(|&i| doc.p_adjusted[i] < doc.alpha_level).count();
            writeln!(
                out,
                "  {} features significant at alpha = {} ({} after FDR adjustment)",
                hits.len(),
                doc.alpha_level,
                fdr_hits
            )
            .unwrap();
            writeln!(
                out,
                "  {:30} {:>10} {:>10} {:>10} {:>10}",
                "feature", "debiased", "se", "p", "p_adj"
            )
            .unwrap();
            let mut order: Vec<usize> = (0..doc.features.len()).collect();
            order.sort_by(|&a, &b| doc.p_value[a].partial_cmp(&doc.p_value[b]).unwrap());
            for &i in order.iter().take(20) {
                writeln!(
                    out,
                    "  {:30} {:>10.4} {:>10.4} {:>10.2e} {:>10.2e}",
                    doc.features[i], doc.debiased[i], doc.se[i], doc.p_value[i], doc.p_adjusted[i]
                )
                .unwrap();
            }
        }
        "selection" => {
            let doc: SelectionDocument = serde_json::from_value(value)?;
            writeln!(out, "Auxiliary selection for target {:?}", doc.target).unwrap();
            writeln!(
                out,
                "  screened {} of {} candidates (r0 = {}, p0 = {})",
                doc.screened.len(),
                doc.candidates.len(),
                doc.r0,
                doc.p0
            )
            .unwrap();
            for (m, name) in doc.screened.iter().enumerate() {
                let marker = if m < doc.m_opt { "*" } else { " " };
                writeln!(out, "  {marker} {:30} CV MSE(1..={}) = {:.5}", name, m + 1, doc.mse_by_m[m])
                    .unwrap();
            }
            writeln!(out, "  selected {} auxiliaries: {:?}", doc.m_opt, doc.selected).unwrap();
            for w in &doc.warnings {
                writeln!(out, "  warning: {w}").unwrap();
            }
        }
        "simulation" => {
            let doc: SimulationDocument = serde_json::from_value(value)?;
            let c = &doc.report.config;
            writeln!(
                out,
                "Simulation study: n = {}, p = {}, s = {}, theta1 = {}, theta2 = {}, \
                 rho = {}, sigma = ({}, {}, {}), {} replications",
                c.n,
                c.p,
                c.s,
                c.theta1,
                c.theta2,
                c.rho,
                c.sigma0,
                c.sigma1,
                c.sigma2,
                c.n_replications
            )
            .unwrap();
            if !doc.report.failed_replications.is_empty() {
                writeln!(out, "  {} replications failed", doc.report.failed_replications.len())
                    .unwrap();
            }
            writeln!(
                out,
                "  {:14} {:>12} {:>12} {:>9} {:>9}",
                "method", "median MSE", "mean MSE", "type-I", "power"
            )
            .unwrap();
            for m in &doc.report.methods {
                writeln!(
                    out,
                    "  {:14} {:>12.4} {:>12.4} {:>9} {:>9}",
                    m.method.name(),
                    m.median_mse,
                    m.mean_mse,
                    m.type_i_rate.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                    m.power.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                )
                .unwrap();
            }
        }
        other => {
            return Err(Error::Config(format!(
                "{}: unknown result kind {other:?}",
                path.display()
            )))
        }
    }
    Ok(out)
}
