//! K-fold cross-validation over the regularization path.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::path::{grid_for_problem, path_on_problem, PathOptions};
use super::{Problem, SolverOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub path: PathOptions,
    pub solver: SolverOptions,
}

impl CvOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, path: PathOptions::default(), solver: SolverOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct CvResult {
    pub lambda_path: Vec<f64>,
    /// Mean squared prediction error over all held-out observations, per grid point.
    pub cv_mean: Vec<f64>,
    /// Standard error of the fold means, per grid point.
    pub cv_se: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_1se: f64,
}

impl CvResult {
    pub fn lambda_at(&self, rule: LambdaRule) -> f64 {
        match rule {
            LambdaRule::Min => self.lambda_min,
            LambdaRule::OneSe => self.lambda_1se,
        }
    }
}

/// Which point of the CV curve to read off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    Min,
    OneSe,
}

/// Deterministic fold assignment: a seeded shuffle of 0..n dealt round-robin.
/// Returns the fold id of each observation.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut folds = vec![0usize; n];
    for (pos, &obs) in order.iter().enumerate() {
        folds[obs] = pos % k;
    }
    folds
}

fn select_rows(x: &Array2<f64>, y: &Array1<f64>, rows: &[usize]) -> (Array2<f64>, Array1<f64>) {
    (x.select(Axis(0), rows), Array1::from_iter(rows.iter().map(|&i| y[i])))
}

/// K-fold cross-validation for the weighted-L1 problem. The penalty grid is
/// computed once on the full data; every fold fits the whole warm-started
/// path. Fold evaluation may run in parallel and reduces in fold order, so
/// results are identical to a sequential run.
pub fn cross_validate(
    x: &Array2<f64>,
    y: &Array1<f64>,
    penalty_factors: &[f64],
    opts: &CvOptions,
) -> Result<CvResult> {
    let n = x.nrows();
    if opts.k < 2 {
        return Err(Error::InvalidParam(format!("cross-validation needs k >= 2, got {}", opts.k)));
    }
    if opts.k > n {
        return Err(Error::TooFewSamples(format!(
            "cannot split {n} observations into {} folds",
            opts.k
        )));
    }

    let problem = Problem::build(x, y, penalty_factors, opts.solver.intercept)?;
    let grid = grid_for_problem(&problem, &opts.path)?;

    let folds = fold_assignment(n, opts.k, opts.seed);
    for f in 0..opts.k {
        let held = folds.iter().filter(|&&id| id == f).count();
        if n - held < 2 {
            return Err(Error::TooFewSamples(format!(
                "fold {f} leaves {} training observations",
                n - held
            )));
        }
    }

    // per fold: (sse per grid point, fold mse per grid point, fold size)
    let per_fold: Vec<Result<(Vec<f64>, Vec<f64>, usize)>> = (0..opts.k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|i| folds[*i] != f).collect();
            let valid: Vec<usize> = (0..n).filter(|i| folds[*i] == f).collect();
            let (xt, yt) = select_rows(x, y, &train);
            let (xv, yv) = select_rows(x, y, &valid);
            let sub = Problem::build(&xt, &yt, penalty_factors, opts.solver.intercept)?;
            let sols = path_on_problem(&sub, &grid, &opts.solver)?;
            let mut sse = Vec::with_capacity(grid.len());
            for (&lambda, sol) in grid.iter().zip(sols) {
                let fit = sub.finish(&xt, &yt, lambda, sol);
                let pred = fit.predict(&xv)?;
                let e: f64 = pred.iter().zip(yv.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                sse.push(e);
            }
            let m = valid.len() as f64;
            let mse: Vec<f64> = sse.iter().map(|s| s / m).collect();
            Ok((sse, mse, valid.len()))
        })
        .collect();

    let mut pooled = vec![0.0; grid.len()];
    let mut fold_means: Vec<Vec<f64>> = Vec::with_capacity(opts.k);
    for res in per_fold {
        let (sse, mse, _) = res?;
        for (acc, v) in pooled.iter_mut().zip(&sse) {
            *acc += v;
        }
        fold_means.push(mse);
    }
    let cv_mean: Vec<f64> = pooled.iter().map(|s| s / n as f64).collect();
    let kf = opts.k as f64;
    let cv_se: Vec<f64> = (0..grid.len())
        .map(|j| {
            let mean = fold_means.iter().map(|f| f[j]).sum::<f64>() / kf;
            let var = fold_means.iter().map(|f| (f[j] - mean) * (f[j] - mean)).sum::<f64>()
                / (kf - 1.0);
            (var / kf).sqrt()
        })
        .collect();

    let mut best = 0usize;
    for j in 1..grid.len() {
        if cv_mean[j] < cv_mean[best] {
            best = j;
        }
    }
    let threshold = cv_mean[best] + cv_se[best];
    let one_se = (0..grid.len()).find(|&j| cv_mean[j] <= threshold).unwrap_or(best);

    Ok(CvResult {
        lambda_path: grid.clone(),
        cv_mean,
        cv_se,
        lambda_min: grid[best],
        lambda_1se: grid[one_se],
    })
}

/// Cross-validated penalty choice for the closed-form ridge baseline over an
/// explicit grid. Returns the grid value minimizing pooled held-out MSE.
pub fn cross_validate_ridge(
    x: &Array2<f64>,
    y: &Array1<f64>,
    grid: &[f64],
    k: usize,
    seed: u64,
    intercept: bool,
) -> Result<f64> {
    let n = x.nrows();
    if k < 2 || k > n {
        return Err(Error::InvalidParam(format!("ridge CV needs 2 <= k <= n, got k = {k}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParam("ridge CV grid is empty".into()));
    }
    let folds = fold_assignment(n, k, seed);
    let per_fold: Vec<Result<Vec<f64>>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|i| folds[*i] != f).collect();
            let valid: Vec<usize> = (0..n).filter(|i| folds[*i] == f).collect();
            let (xt, yt) = select_rows(x, y, &train);
            let (xv, yv) = select_rows(x, y, &valid);
            let mut sse = Vec::with_capacity(grid.len());
            for &lambda in grid {
                let fit = super::solve_ridge(&xt, &yt, lambda, intercept)?;
                let pred = fit.predict(&xv)?;
                sse.push(pred.iter().zip(yv.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
            }
            Ok(sse)
        })
        .collect();

    let mut pooled = vec![0.0; grid.len()];
    for res in per_fold {
        for (acc, v) in pooled.iter_mut().zip(res?) {
            *acc += v;
        }
    }
    let mut best = 0usize;
    for j in 1..grid.len() {
        if pooled[j] < pooled[best] {
            best = j;
        }
    }
    Ok(grid[best])
}
