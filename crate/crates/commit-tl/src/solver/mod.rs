//! Weighted-L1 penalized least squares by cyclic coordinate descent.
//!
//! Solves `(1/2n)·||y - b0 - X beta||^2 + lambda * sum_k factor_k * |beta_k|`
//! with per-coefficient penalty factors (factor 0 leaves a coefficient
//! unpenalized). Columns are standardized internally for conditioning and the
//! solution is mapped back, so the objective above is exactly the one being
//! minimized on the original data scale. A closed-form ridge solver is
//! included for baseline comparisons.

mod cv;
mod path;

pub use cv::{cross_validate, cross_validate_ridge, fold_assignment, CvOptions, CvResult, LambdaRule};
pub use path::{lambda_grid, solve_path, PathOptions};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, solve_spd};

/// Relative scale below which a column is treated as constant.
const DEGENERATE_SCALE_TOL: f64 = 1e-10;

/// Global penalty level plus per-coefficient multipliers.
#[derive(Debug, Clone)]
pub struct PenaltySpec {
    pub lambda: f64,
    pub factors: Vec<f64>,
}

impl PenaltySpec {
    /// All coefficients penalized equally.
    pub fn uniform(lambda: f64, p: usize) -> Self {
        Self { lambda, factors: vec![1.0; p] }
    }

    pub fn with_factors(lambda: f64, factors: Vec<f64>) -> Self {
        Self { lambda, factors }
    }

    fn validate(&self, p: usize) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidParam(format!(
                "lambda must be a nonnegative finite number, got {}",
                self.lambda
            )));
        }
        if self.factors.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "penalty has {} factors but X has {} columns",
                self.factors.len(),
                p
            )));
        }
        if self.factors.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::InvalidParam(
                "penalty factors must be nonnegative finite numbers".into(),
            ));
        }
        Ok(())
    }
}

/// Solver controls. The defaults match the crate-wide conventions: intercept
/// by centering, sweep tolerance 1e-7 on the standardized scale, at most
/// 10_000 sweeps, active-set cycling after the first full sweep.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub intercept: bool,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Warm start on the original coefficient scale.
    pub warm_start: Option<Vec<f64>>,
    /// Record the objective after every sweep (diagnostic).
    pub record_objective: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            intercept: true,
            tol: 1e-7,
            max_sweeps: 10_000,
            warm_start: None,
            record_objective: false,
        }
    }
}

impl SolverOptions {
    pub fn no_intercept() -> Self {
        Self { intercept: false, ..Self::default() }
    }
}

/// A fitted penalized least-squares solution on the original data scale.
#[derive(Debug, Clone)]
pub struct PenalizedFit {
    pub coefficients: Array1<f64>,
    pub intercept: f64,
    pub lambda_used: f64,
    pub n_iterations: usize,
    pub converged: bool,
    pub objective_value: f64,
    /// Zero-variance penalized columns whose coefficient was pinned to 0.
    pub degenerate_columns: Vec<usize>,
    /// Objective after each sweep, present when requested in the options.
    pub objective_trace: Option<Vec<f64>>,
}

impl PenalizedFit {
    pub fn nonzero_count(&self) -> usize {
        self.coefficients.iter().filter(|c| **c != 0.0).count()
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.coefficients.len() {
            return Err(Error::DimensionMismatch(format!(
                "predict: X has {} columns, fit has {} coefficients",
                x.ncols(),
                self.coefficients.len()
            )));
        }
        Ok(x.dot(&self.coefficients) + self.intercept)
    }
}

/// Soft-thresholding operator `sign(z) * max(|z| - gamma, 0)`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0);
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn check_finite(x: &Array2<f64>, y: &Array1<f64>) -> Result<()> {
    if let Some((i, j)) = x
        .indexed_iter()
        .find_map(|((i, j), v)| (!v.is_finite()).then_some((i, j)))
    {
        return Err(Error::NonFinite(format!("X at row {i}, column {j}")));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("y at position {i}")));
    }
    Ok(())
}

/// The standardized working problem shared by the single-fit, path, and CV
/// entry points. Columns are stored contiguously; degenerate columns keep a
/// zeroed buffer and are skipped by the descent loop.
pub(crate) struct Problem {
    n: usize,
    p: usize,
    cols: Vec<Vec<f64>>,
    y: Vec<f64>,
    /// x_std_k . x_std_k / n, the coordinate-update curvature (0 if degenerate).
    curvature: Vec<f64>,
    scale: Vec<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
    factors: Vec<f64>,
    degenerate: Vec<usize>,
    intercept: bool,
}

pub(crate) struct Solution {
    pub beta_std: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub trace: Option<Vec<f64>>,
}

impl Problem {
    pub(crate) fn build(
        x: &Array2<f64>,
        y: &Array1<f64>,
        factors: &[f64],
        intercept: bool,
    ) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "X has {n} rows but y has length {}",
                y.len()
            )));
        }
        if n < 2 {
            return Err(Error::TooFewSamples(format!("need at least 2 observations, got {n}")));
        }
        check_finite(x, y)?;

        let y_mean = if intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
        let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

        let mut cols = Vec::with_capacity(p);
        let mut curvature = vec![0.0; p];
        let mut scale = vec![1.0; p];
        let mut x_mean = vec![0.0; p];
        let mut degenerate = Vec::new();
        let inv_n = 1.0 / n as f64;

        for k in 0..p {
            let col = x.column(k);
            let mean = if intercept { col.sum() * inv_n } else { 0.0 };
            let mut buf: Vec<f64> = col.iter().map(|v| v - mean).collect();
            let ms = dot(&buf, &buf) * inv_n;
            let rms_raw = col.iter().map(|v| v * v).sum::<f64>() * inv_n;
            let s = ms.sqrt();
            if s <= DEGENERATE_SCALE_TOL * rms_raw.sqrt() || s == 0.0 {
                degenerate.push(k);
                buf.iter_mut().for_each(|v| *v = 0.0);
                cols.push(buf);
                continue;
            }
            buf.iter_mut().for_each(|v| *v /= s);
            curvature[k] = dot(&buf, &buf) * inv_n;
            scale[k] = s;
            x_mean[k] = mean;
            cols.push(buf);
        }

        Ok(Self {
            n,
            p,
            cols,
            y: yc,
            curvature,
            scale,
            x_mean,
            y_mean,
            factors: factors.to_vec(),
            degenerate,
            intercept,
        })
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    /// Errors if a degenerate column is effectively unpenalized at `lambda`
    /// (unpenalized degeneracy breaks identifiability).
    fn check_degenerate(&self, lambda: f64) -> Result<()> {
        for &k in &self.degenerate {
            if lambda * self.factors[k] == 0.0 {
                return Err(Error::DegenerateColumn {
                    index: k,
                    reason: "zero-variance column is unpenalized".into(),
                });
            }
        }
        Ok(())
    }

    /// Internal threshold for column k at penalty level `lambda`: the
    /// objective is stated on the original scale, so the standardized-space
    /// factor is `factor_k / scale_k`.
    #[inline]
    fn threshold(&self, lambda: f64, k: usize) -> f64 {
        lambda * self.factors[k] / self.scale[k]
    }

    fn objective_std(&self, beta: &[f64], residual: &[f64], lambda: f64) -> f64 {
        let inv_2n = 0.5 / self.n as f64;
        let mut obj = dot(residual, residual) * inv_2n;
        for k in 0..self.p {
            obj += lambda * self.factors[k] / self.scale[k] * beta[k].abs();
        }
        obj
    }

    /// Cyclic coordinate descent with active-set iterations after each full
    /// sweep. `warm` is on the standardized coefficient scale.
    pub(crate) fn solve(
        &self,
        lambda: f64,
        warm: Option<&[f64]>,
        opts: &SolverOptions,
    ) -> Result<Solution> {
        self.check_degenerate(lambda)?;

        let n_inv = 1.0 / self.n as f64;
        let mut beta = match warm {
            Some(w) => {
                debug_assert_eq!(w.len(), self.p);
                w.to_vec()
            }
            None => vec![0.0; self.p],
        };
        for &k in &self.degenerate {
            beta[k] = 0.0;
        }

        // residual = y - X_std beta
        let mut residual = self.y.clone();
        for k in 0..self.p {
            if beta[k] != 0.0 {
                axpy(-beta[k], &self.cols[k], &mut residual);
            }
        }

        let mut trace = opts.record_objective.then(Vec::new);
        let mut active = vec![false; self.p];
        let mut sweeps = 0usize;
        let mut converged = false;

        let sweep = |beta: &mut Vec<f64>, residual: &mut Vec<f64>, full: bool, active: &mut Vec<bool>| -> f64 {
            let mut max_change = 0.0f64;
            for k in 0..self.p {
                if !full && !active[k] {
                    continue;
                }
                let curv = self.curvature[k];
                if curv == 0.0 {
                    continue;
                }
                let old = beta[k];
                let rho = dot(&self.cols[k], residual) * n_inv + curv * old;
                let new = soft_threshold(rho, self.threshold(lambda, k)) / curv;
                if new != old {
                    axpy(old - new, &self.cols[k], residual);
                    beta[k] = new;
                    max_change = max_change.max((new - old).abs());
                }
                if full {
                    active[k] = beta[k] != 0.0;
                }
            }
            max_change
        };

        while sweeps < opts.max_sweeps {
            let change = sweep(&mut beta, &mut residual, true, &mut active);
            sweeps += 1;
            if let Some(t) = trace.as_mut() {
                t.push(self.objective_std(&beta, &residual, lambda));
            }
            if change < opts.tol {
                converged = true;
                break;
            }
            loop {
                if sweeps >= opts.max_sweeps {
                    break;
                }
                let change = sweep(&mut beta, &mut residual, false, &mut active);
                sweeps += 1;
                if let Some(t) = trace.as_mut() {
                    t.push(self.objective_std(&beta, &residual, lambda));
                }
                if change < opts.tol {
                    break;
                }
            }
        }

        // Exactly satisfy the zero-gradient condition for unpenalized
        // coefficients (lambda * factor == 0) by refitting that block against
        // the current residual. Skipped when the block's Gram matrix is
        // singular, e.g. lambda = 0 with p > n.
        let unpenalized: Vec<usize> = (0..self.p)
            .filter(|&k| lambda * self.factors[k] == 0.0 && self.curvature[k] > 0.0)
            .collect();
        if !unpenalized.is_empty() {
            let m = unpenalized.len();
            let mut gram = Array2::<f64>::zeros((m, m));
            let mut rhs = Array1::<f64>::zeros(m);
            // target = residual + X_U beta_U, i.e. y minus the penalized part
            let mut target = residual.clone();
            for &k in &unpenalized {
                if beta[k] != 0.0 {
                    axpy(beta[k], &self.cols[k], &mut target);
                }
            }
            for a in 0..m {
                let ka = unpenalized[a];
                rhs[a] = dot(&self.cols[ka], &target) * n_inv;
                for b in a..m {
                    let kb = unpenalized[b];
                    let g = dot(&self.cols[ka], &self.cols[kb]) * n_inv;
                    gram[(a, b)] = g;
                    gram[(b, a)] = g;
                }
            }
            if let Ok(refit) = solve_spd(&gram, &rhs) {
                for (a, &k) in unpenalized.iter().enumerate() {
                    let delta = refit[a] - beta[k];
                    if delta != 0.0 {
                        axpy(-delta, &self.cols[k], &mut residual);
                        beta[k] = refit[a];
                    }
                }
            }
        }

        Ok(Solution { beta_std: beta, sweeps, converged, trace })
    }

    /// Map a standardized solution back to the original scale.
    pub(crate) fn finish(
        &self,
        x: &Array2<f64>,
        y: &Array1<f64>,
        lambda: f64,
        sol: Solution,
    ) -> PenalizedFit {
        let mut coefficients = Array1::<f64>::zeros(self.p);
        for k in 0..self.p {
            coefficients[k] = sol.beta_std[k] / self.scale[k];
        }
        let intercept = if self.intercept {
            self.y_mean
                - coefficients
                    .iter()
                    .zip(&self.x_mean)
                    .map(|(b, m)| b * m)
                    .sum::<f64>()
        } else {
            0.0
        };

        let fitted = x.dot(&coefficients) + intercept;
        let inv_2n = 0.5 / self.n as f64;
        let rss: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        let mut objective_value = rss * inv_2n;
        for k in 0..self.p {
            objective_value += lambda * self.factors[k] * coefficients[k].abs();
        }

        PenalizedFit {
            coefficients,
            intercept,
            lambda_used: lambda,
            n_iterations: sol.sweeps,
            converged: sol.converged,
            objective_value,
            degenerate_columns: self.degenerate.clone(),
            objective_trace: sol.trace,
        }
    }

    /// Standardized-scale warm start from an original-scale coefficient vector.
    pub(crate) fn internalize(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.p).map(|k| beta[k] * self.scale[k]).collect()
    }

    /// Smallest penalty level at which every penalized coefficient is zero,
    /// with the unpenalized block (factor 0) fit exactly first.
    pub(crate) fn lambda_max(&self) -> Result<f64> {
        let n_inv = 1.0 / self.n as f64;
        let unpenalized: Vec<usize> = (0..self.p)
            .filter(|&k| self.factors[k] == 0.0 && self.curvature[k] > 0.0)
            .collect();
        let mut residual = self.y.clone();
        if !unpenalized.is_empty() {
            let m = unpenalized.len();
            let mut gram = Array2::<f64>::zeros((m, m));
            let mut rhs = Array1::<f64>::zeros(m);
            for a in 0..m {
                let ka = unpenalized[a];
                rhs[a] = dot(&self.cols[ka], &residual) * n_inv;
                for b in a..m {
                    let kb = unpenalized[b];
                    let g = dot(&self.cols[ka], &self.cols[kb]) * n_inv;
                    gram[(a, b)] = g;
                    gram[(b, a)] = g;
                }
            }
            let coef = solve_spd(&gram, &rhs).map_err(|_| {
                Error::Numerical("unpenalized block is singular while computing the penalty grid".into())
            })?;
            for (a, &k) in unpenalized.iter().enumerate() {
                axpy(-coef[a], &self.cols[k], &mut residual);
            }
        }
        let mut lmax = 0.0f64;
        for k in 0..self.p {
            if self.factors[k] > 0.0 && self.curvature[k] > 0.0 {
                let grad = dot(&self.cols[k], &residual) * n_inv * self.scale[k];
                lmax = lmax.max(grad.abs() / self.factors[k]);
            }
        }
        if lmax <= 0.0 || !lmax.is_finite() {
            return Err(Error::Numerical(
                "lambda_max is not positive; no penalized column correlates with the response".into(),
            ));
        }
        Ok(lmax)
    }
}

/// Fits the weighted-L1 penalized least-squares problem at a single penalty
/// level. Deterministic for fixed inputs; returns `converged = false` (with
/// the best iterate) if the sweep limit is hit.
pub fn solve_penalized_ls(
    x: &Array2<f64>,
    y: &Array1<f64>,
    penalty: &PenaltySpec,
    options: &SolverOptions,
) -> Result<PenalizedFit> {
    penalty.validate(x.ncols())?;
    let problem = Problem::build(x, y, &penalty.factors, options.intercept)?;
    let warm = options.warm_start.as_ref().map(|w| problem.internalize(w));
    let sol = problem.solve(penalty.lambda, warm.as_deref(), options)?;
    Ok(problem.finish(x, y, penalty.lambda, sol))
}

/// Closed-form ridge regression `(X'X + n lambda I)^-1 X'y` on centered data.
/// Uses the dual form when p > n so only an n x n system is factorized.
pub fn solve_ridge(
    x: &Array2<f64>,
    y: &Array1<f64>,
    lambda: f64,
    intercept: bool,
) -> Result<PenalizedFit> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParam(format!(
            "ridge lambda must be strictly positive, got {lambda}"
        )));
    }
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "X has {n} rows but y has length {}",
            y.len()
        )));
    }
    check_finite(x, y)?;

    let y_mean = if intercept { y.mean().unwrap_or(0.0) } else { 0.0 };
    let x_mean: Vec<f64> = if intercept {
        (0..p).map(|k| x.column(k).sum() / n as f64).collect()
    } else {
        vec![0.0; p]
    };
    let mut xc = x.to_owned();
    for k in 0..p {
        if x_mean[k] != 0.0 {
            xc.column_mut(k).iter_mut().for_each(|v| *v -= x_mean[k]);
        }
    }
    let yc = y.mapv(|v| v - y_mean);

    let nl = n as f64 * lambda;
    let coefficients = if p <= n {
        let mut gram = xc.t().dot(&xc);
        for k in 0..p {
            gram[(k, k)] += nl;
        }
        let rhs = xc.t().dot(&yc);
        solve_spd(&gram, &rhs)?
    } else {
        let mut outer = xc.dot(&xc.t());
        for i in 0..n {
            outer[(i, i)] += nl;
        }
        let alpha = solve_spd(&outer, &yc)?;
        xc.t().dot(&alpha)
    };

    let intercept_val = if intercept {
        y_mean - coefficients.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>()
    } else {
        0.0
    };
    let fitted = x.dot(&coefficients) + intercept_val;
    let rss: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let objective_value =
        rss * 0.5 / n as f64 + 0.5 * lambda * coefficients.iter().map(|b| b * b).sum::<f64>();

    Ok(PenalizedFit {
        coefficients,
        intercept: intercept_val,
        lambda_used: lambda,
        n_iterations: 0,
        converged: true,
        objective_value,
        degenerate_columns: Vec::new(),
        objective_trace: None,
    })
}

/// Largest KKT violation of a fit for the stated objective: for penalized
/// coordinates the subgradient bound `|x_k'r/n| <= lambda*factor_k` (with
/// equality against the sign at nonzero coordinates), for unpenalized
/// coordinates exact orthogonality of the residual.
pub fn kkt_max_violation(
    x: &Array2<f64>,
    y: &Array1<f64>,
    penalty: &PenaltySpec,
    fit: &PenalizedFit,
) -> f64 {
    let n = x.nrows() as f64;
    let fitted = x.dot(&fit.coefficients) + fit.intercept;
    let residual = y - &fitted;
    let mut worst = 0.0f64;
    for k in 0..x.ncols() {
        if fit.degenerate_columns.contains(&k) {
            continue;
        }
        let grad = x.column(k).dot(&residual) / n;
        let bound = penalty.lambda * penalty.factors[k];
        if bound == 0.0 {
            worst = worst.max(grad.abs());
        } else if fit.coefficients[k] != 0.0 {
            worst = worst.max((grad - bound * fit.coefficients[k].signum()).abs());
        } else {
            worst = worst.max(grad.abs() - bound);
        }
    }
    worst
}
