//! Warm-started regularization paths on a log-spaced penalty grid.

use ndarray::{Array1, Array2};

use super::{PenalizedFit, Problem, SolverOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PathOptions {
    /// Number of grid points (>= 2).
    pub n_lambda: usize,
    /// Ratio of the smallest to the largest grid value. Defaults to 1e-3 when
    /// n < p and 1e-4 otherwise.
    pub lambda_min_ratio: Option<f64>,
    /// Explicit decreasing grid, overriding the automatic one.
    pub lambdas: Option<Vec<f64>>,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self { n_lambda: 100, lambda_min_ratio: None, lambdas: None }
    }
}

impl PathOptions {
    pub fn with_n_lambda(n_lambda: usize) -> Self {
        Self { n_lambda, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n_lambda < 2 {
            return Err(Error::InvalidParam(format!(
                "path needs at least 2 penalty values, got {}",
                self.n_lambda
            )));
        }
        if let Some(ratio) = self.lambda_min_ratio {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::InvalidParam(format!(
                    "lambda_min_ratio must lie in (0, 1), got {ratio}"
                )));
            }
        }
        if let Some(grid) = &self.lambdas {
            if grid.len() < 2 {
                return Err(Error::InvalidParam("explicit grid needs at least 2 values".into()));
            }
            if grid.windows(2).any(|w| w[1] >= w[0]) || grid.iter().any(|l| *l <= 0.0) {
                return Err(Error::InvalidParam(
                    "explicit grid must be strictly decreasing and positive".into(),
                ));
            }
        }
        Ok(())
    }
}

pub(crate) fn grid_for_problem(problem: &Problem, opts: &PathOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    if let Some(grid) = &opts.lambdas {
        return Ok(grid.clone());
    }
    let lmax = problem.lambda_max()?;
    let ratio = opts
        .lambda_min_ratio
        .unwrap_or(if problem.n() < problem.p { 1e-3 } else { 1e-4 });
    let m = opts.n_lambda;
    let log_max = lmax.ln();
    let log_min = (lmax * ratio).ln();
    let step = (log_min - log_max) / (m - 1) as f64;
    Ok((0..m).map(|i| (log_max + step * i as f64).exp()).collect())
}

/// The log-spaced decreasing penalty grid for a problem, anchored at the
/// smallest value that zeroes every penalized coefficient.
pub fn lambda_grid(
    x: &Array2<f64>,
    y: &Array1<f64>,
    penalty_factors: &[f64],
    intercept: bool,
    opts: &PathOptions,
) -> Result<Vec<f64>> {
    let problem = Problem::build(x, y, penalty_factors, intercept)?;
    grid_for_problem(&problem, opts)
}

pub(crate) fn path_on_problem(
    problem: &Problem,
    grid: &[f64],
    solver: &SolverOptions,
) -> Result<Vec<super::Solution>> {
    let mut fits = Vec::with_capacity(grid.len());
    let mut warm: Option<Vec<f64>> = None;
    for &lambda in grid {
        let sol = problem.solve(lambda, warm.as_deref(), solver)?;
        warm = Some(sol.beta_std.clone());
        fits.push(sol);
    }
    Ok(fits)
}

/// Fits the whole path, each solution warm-started from the previous one.
/// Output order matches the decreasing grid; `lambda_used` and the nonzero
/// count of each fit record the path's shape.
pub fn solve_path(
    x: &Array2<f64>,
    y: &Array1<f64>,
    penalty_factors: &[f64],
    path_opts: &PathOptions,
    solver_opts: &SolverOptions,
) -> Result<Vec<PenalizedFit>> {
    let problem = Problem::build(x, y, penalty_factors, solver_opts.intercept)?;
    let grid = grid_for_problem(&problem, path_opts)?;
    let sols = path_on_problem(&problem, &grid, solver_opts)?;
    Ok(grid
        .iter()
        .zip(sols)
        .map(|(&lambda, sol)| problem.finish(x, y, lambda, sol))
        .collect())
}
