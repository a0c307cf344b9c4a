//! Nodewise lasso residuals: the projection directions used for debiasing.
//!
//! For each column l, `x_l` is regressed (no intercept, L1 penalty `zeta_l`)
//! on the remaining columns; the residual `z_l` plays the role of an
//! approximately-orthogonal direction. `tau_l = |z_l'x_l| / ||z_l||` converts
//! a noise scale into a per-coordinate standard error, and the bias factor
//! `eta_l = max_{k != l} |z_l'x_k| / ||z_l||` measures how trustworthy the
//! direction is.

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{
    cross_validate, solve_penalized_ls, CvOptions, LambdaRule, PathOptions, PenaltySpec,
    SolverOptions,
};

/// How the nodewise penalty levels are chosen.
#[derive(Debug, Clone)]
pub enum ZetaPolicy {
    /// Per-column k-fold cross-validation (the default; slow but tuned).
    CrossValidated { k: usize, rule: LambdaRule, seed: u64 },
    /// `zeta_l = scale * sd(x_l) * sqrt(log p / n)`, no data refitting.
    Plugin { scale: f64 },
    /// One fixed value for every column.
    Fixed(f64),
}

impl Default for ZetaPolicy {
    fn default() -> Self {
        ZetaPolicy::CrossValidated { k: 5, rule: LambdaRule::Min, seed: 0 }
    }
}

/// Serializable mirror of `ZetaPolicy` for configuration files.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ZetaChoice {
    /// Per-column cross-validation.
    CrossValidated { k: usize },
    /// `zeta_l = scale * sd(x_l) * sqrt(log p / n)` (fast, no refitting).
    Plugin { scale: f64 },
}

impl Default for ZetaChoice {
    fn default() -> Self {
        ZetaChoice::CrossValidated { k: 5 }
    }
}

impl ZetaChoice {
    pub fn to_policy(self, seed: u64) -> ZetaPolicy {
        match self {
            ZetaChoice::CrossValidated { k } => {
                ZetaPolicy::CrossValidated { k, rule: LambdaRule::Min, seed }
            }
            ZetaChoice::Plugin { scale } => ZetaPolicy::Plugin { scale },
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodewiseOptions {
    pub zeta: ZetaPolicy,
    pub path: PathOptions,
    pub solver: SolverOptions,
    /// A column is degenerate when its residual norm falls below this
    /// fraction of the column norm (the column is explained by the others).
    pub degeneracy_tol: f64,
}

impl Default for NodewiseOptions {
    fn default() -> Self {
        Self {
            zeta: ZetaPolicy::default(),
            path: PathOptions::default(),
            solver: SolverOptions::no_intercept(),
            degeneracy_tol: 1e-2,
        }
    }
}

impl NodewiseOptions {
    pub fn with_zeta(zeta: ZetaPolicy) -> Self {
        Self { zeta, ..Default::default() }
    }
}

/// Residual matrix and the per-column diagnostics derived from it.
#[derive(Debug, Clone)]
pub struct NodewiseResiduals {
    /// n x p; column l is the residual z_l.
    pub residuals: Array2<f64>,
    /// tau_l = |z_l'x_l| / ||z_l||_2, all strictly positive.
    pub tau: Array1<f64>,
    /// Bias factors eta_l = max_{k != l} |z_l'x_k| / ||z_l||_2.
    pub eta: Array1<f64>,
    /// Penalty level used per column.
    pub zetas: Array1<f64>,
}

impl NodewiseResiduals {
    pub fn p(&self) -> usize {
        self.residuals.ncols()
    }

    pub fn n(&self) -> usize {
        self.residuals.nrows()
    }

    pub fn eta_max(&self) -> f64 {
        self.eta.iter().cloned().fold(0.0, f64::max)
    }
}

fn drop_column(x: &Array2<f64>, l: usize) -> Array2<f64> {
    let keep: Vec<usize> = (0..x.ncols()).filter(|&k| k != l).collect();
    x.select(Axis(1), &keep)
}

/// Computes all p nodewise residuals. The per-column regressions are
/// independent and run in parallel; results are assembled in column order.
pub fn nodewise_residuals(x: &Array2<f64>, opts: &NodewiseOptions) -> Result<NodewiseResiduals> {
    let n = x.nrows();
    let p = x.ncols();
    if p < 2 {
        return Err(Error::InvalidParam(format!("nodewise regression needs p >= 2, got {p}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix".into()));
    }
    let solver = SolverOptions { intercept: false, ..opts.solver.clone() };

    let per_col: Vec<Result<(Vec<f64>, f64)>> = (0..p)
        .into_par_iter()
        .map(|l| {
            let target = x.column(l).to_owned();
            let others = drop_column(x, l);
            let ones = vec![1.0; p - 1];
            let zeta = match &opts.zeta {
                ZetaPolicy::Fixed(v) => *v,
                ZetaPolicy::Plugin { scale } => {
                    let mean = target.sum() / n as f64;
                    let sd = (target.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / n as f64)
                        .sqrt();
                    scale * sd * ((p as f64).ln() / n as f64).sqrt()
                }
                ZetaPolicy::CrossValidated { k, rule, seed } => {
                    let cv = cross_validate(
                        &others,
                        &target,
                        &ones,
                        &CvOptions {
                            k: *k,
                            seed: *seed,
                            path: opts.path.clone(),
                            solver: solver.clone(),
                        },
                    )?;
                    cv.lambda_at(*rule)
                }
            };
            let fit =
                solve_penalized_ls(&others, &target, &PenaltySpec::uniform(zeta, p - 1), &solver)?;
            let fitted = others.dot(&fit.coefficients);
            let z: Vec<f64> = target.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();

            let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x_norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
            if z_norm <= opts.degeneracy_tol * x_norm {
                return Err(Error::DegenerateColumn {
                    index: l,
                    reason: format!(
                        "residual norm {:.3e} below {:.1e} of the column norm; \
                         the column is explained by the others",
                        z_norm, opts.degeneracy_tol
                    ),
                });
            }
            let zx: f64 = z.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            if zx.abs() <= 1e-10 * z_norm * x_norm {
                return Err(Error::DegenerateColumn {
                    index: l,
                    reason: "residual nearly orthogonal to its own column".into(),
                });
            }
            Ok((z, zeta))
        })
        .collect();

    let mut residuals = Array2::<f64>::zeros((n, p));
    let mut zetas = Array1::<f64>::zeros(p);
    for (l, res) in per_col.into_iter().enumerate() {
        let (z, zeta) = res?;
        residuals.column_mut(l).assign(&Array1::from(z));
        zetas[l] = zeta;
    }

    let (eta, _) = bias_factor_report(&residuals, x)?;
    let mut tau = Array1::<f64>::zeros(p);
    for l in 0..p {
        let z = residuals.column(l);
        let zx = z.dot(&x.column(l));
        tau[l] = zx.abs() / z.dot(&z).sqrt();
    }
    Ok(NodewiseResiduals { residuals, tau, eta, zetas })
}

/// The per-column bias factors `eta_l` and their maximum, computed directly
/// from a residual matrix and the design. Reported alongside inference output
/// as a debiasing-quality diagnostic.
pub fn bias_factor_report(z: &Array2<f64>, x: &Array2<f64>) -> Result<(Array1<f64>, f64)> {
    if z.dim() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "residual matrix is {:?} but design is {:?}",
            z.dim(),
            x.dim()
        )));
    }
    let p = x.ncols();
    let mut eta = Array1::<f64>::zeros(p);
    for l in 0..p {
        let zl = z.column(l);
        let norm = zl.dot(&zl).sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateColumn { index: l, reason: "zero residual column".into() });
        }
        let mut worst = 0.0f64;
        for k in 0..p {
            if k != l {
                worst = worst.max(zl.dot(&x.column(k)).abs());
            }
        }
        eta[l] = worst / norm;
    }
    let eta_max = eta.iter().cloned().fold(0.0, f64::max);
    Ok((eta, eta_max))
}
