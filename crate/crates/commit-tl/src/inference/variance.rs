//! Estimators of the target-model noise variance.
//!
//! Three estimators are provided: the plain mean squared residual of the
//! debiased fit ("naive", biased downward when many coefficients are active),
//! the support-corrected variant dividing by `n - s_hat`, and a dedicated
//! penalized fit whose value-of-objective form
//! `mean squared residual + 2 * lambda * ||beta||_1` is the default.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::LambdaPolicy;
use crate::solver::{
    cross_validate, solve_penalized_ls, CvOptions, PathOptions, PenaltySpec, SolverOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMethod {
    Naive,
    Sf,
    Natural,
}

impl Default for VarianceMethod {
    fn default() -> Self {
        VarianceMethod::Natural
    }
}

/// Options for the dedicated lasso behind the default variance estimator.
///
/// The penalty is cross-validated on a path that stops at 2% of the maximum:
/// when the coefficient vector is dense relative to n the CV curve is nearly
/// flat, and without the floor the minimizer sporadically lands in the
/// interpolation zone where the residual (and hence the estimate) collapses.
#[derive(Debug, Clone)]
pub struct NaturalLassoOptions {
    pub lambda: LambdaPolicy,
    pub intercept: bool,
    pub seed: u64,
    pub path: PathOptions,
    pub solver: SolverOptions,
}

impl Default for NaturalLassoOptions {
    fn default() -> Self {
        Self {
            lambda: LambdaPolicy::default(),
            intercept: true,
            seed: 0,
            path: PathOptions { lambda_min_ratio: Some(0.02), ..Default::default() },
            solver: SolverOptions::default(),
        }
    }
}

fn mean_squared_residual(
    x: &Array2<f64>,
    y: &Array1<f64>,
    beta: &Array1<f64>,
    intercept: f64,
) -> f64 {
    let fitted = x.dot(beta) + intercept;
    y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

/// Mean squared residual of a (typically debiased) coefficient vector.
pub fn naive_variance(x: &Array2<f64>, y: &Array1<f64>, beta: &Array1<f64>, intercept: f64) -> f64 {
    mean_squared_residual(x, y, beta, intercept)
}

/// Sum of squared residuals divided by `n - s_hat`, where `s_hat` is the
/// support size of the penalized fit. Errors when `s_hat >= n`.
pub fn support_corrected_variance(
    x: &Array2<f64>,
    y: &Array1<f64>,
    beta: &Array1<f64>,
    intercept: f64,
) -> Result<f64> {
    let n = y.len();
    let s_hat = beta.iter().filter(|v| **v != 0.0).count();
    if s_hat >= n {
        return Err(Error::SfDegenerate { s_hat, n });
    }
    let fitted = x.dot(beta) + intercept;
    let rss: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(rss / (n - s_hat) as f64)
}

/// Runs its own lasso of `y` on `x` and returns
/// `mean squared residual + 2 * lambda * ||beta||_1` together with the
/// penalty level used. Consistent for the noise variance under sparsity.
pub fn natural_lasso_variance(
    x: &Array2<f64>,
    y: &Array1<f64>,
    opts: &NaturalLassoOptions,
) -> Result<(f64, f64)> {
    let p = x.ncols();
    let solver = SolverOptions { intercept: opts.intercept, ..opts.solver.clone() };
    let ones = vec![1.0; p];
    let lambda = match &opts.lambda {
        LambdaPolicy::Fixed(v) => *v,
        LambdaPolicy::CrossValidated { k, rule } => {
            let cv = cross_validate(
                x,
                y,
                &ones,
                &CvOptions { k: *k, seed: opts.seed, path: opts.path.clone(), solver: solver.clone() },
            )?;
            cv.lambda_at(*rule)
        }
    };
    let fit = solve_penalized_ls(x, y, &PenaltySpec::uniform(lambda, p), &solver)?;
    let msr = mean_squared_residual(x, y, &fit.coefficients, fit.intercept);
    let l1: f64 = fit.coefficients.iter().map(|v| v.abs()).sum();
    Ok((msr + 2.0 * lambda * l1, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn gaussian(seed: u64, n: usize, p: usize) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, p), |_| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
    }

    #[test]
    fn exact_fit_gives_zero_naive_variance() {
        let x = gaussian(1, 30, 5);
        let beta = Array1::from_shape_fn(5, |k| k as f64 * 0.3);
        let y = x.dot(&beta);
        assert_eq!(naive_variance(&x, &y, &beta, 0.0), 0.0);
    }

    #[test]
    fn zero_penalty_full_rank_reduces_to_naive_at_ols() {
        let n = 40;
        let p = 6;
        let x = gaussian(2, n, p);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = Array1::from_shape_fn(n, |i| x[(i, 1)] + 0.3 * rng.random::<f64>());

        let opts = NaturalLassoOptions {
            lambda: LambdaPolicy::Fixed(0.0),
            intercept: false,
            ..Default::default()
        };
        let (nat, lambda) = natural_lasso_variance(&x, &y, &opts).unwrap();
        assert_eq!(lambda, 0.0);

        let ols = solve_penalized_ls(
            &x,
            &y,
            &PenaltySpec::uniform(0.0, p),
            &SolverOptions::no_intercept(),
        )
        .unwrap();
        let naive = naive_variance(&x, &y, &ols.coefficients, 0.0);
        assert!((nat - naive).abs() < 1e-12);
    }

    #[test]
    fn support_corrected_errors_when_support_fills_sample() {
        let x = gaussian(4, 4, 6);
        let y = Array1::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let beta = Array1::from_elem(6, 0.5);
        let err = support_corrected_variance(&x, &y, &beta, 0.0).unwrap_err();
        assert!(matches!(err, Error::SfDegenerate { s_hat: 6, n: 4 }));
    }

    #[test]
    fn support_corrected_exceeds_naive() {
        let n = 30;
        let x = gaussian(5, n, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = Array1::from_shape_fn(n, |i| 0.8 * x[(i, 0)] + 0.5 * rng.random::<f64>());
        let fit = solve_penalized_ls(
            &x,
            &y,
            &PenaltySpec::uniform(0.05, 4),
            &SolverOptions::default(),
        )
        .unwrap();
        let sf = support_corrected_variance(&x, &y, &fit.coefficients, fit.intercept).unwrap();
        let naive = naive_variance(&x, &y, &fit.coefficients, fit.intercept);
        assert!(sf >= naive);
    }
}
