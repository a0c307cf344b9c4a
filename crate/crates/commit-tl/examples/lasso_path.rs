//! The weighted-L1 solver: a single fit with penalty factors, a warm-started
//! regularization path, and cross-validated penalty selection.
//!
//! ```bash
//! cargo run --example lasso_path
//! ```

use commit_tl::solver::{
    cross_validate, solve_path, solve_penalized_ls, CvOptions, PathOptions, PenaltySpec,
    SolverOptions,
};
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> commit_tl::Result<()> {
    // y depends on the first three of twelve correlated columns
    let n = 80;
    let p = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>() * 2.0 - 1.0);
    let y = Array1::from_shape_fn(n, |i| {
        2.0 * x[(i, 0)] - 1.0 * x[(i, 1)] + 0.5 * x[(i, 2)] + 0.3 * (rng.random::<f64>() - 0.5)
    });

    // single fit; column 0 unpenalized via its factor
    let mut factors = vec![1.0; p];
    factors[0] = 0.0;
    let fit = solve_penalized_ls(
        &x,
        &y,
        &PenaltySpec::with_factors(0.05, factors.clone()),
        &SolverOptions::default(),
    )?;
    println!("single fit at lambda 0.05 (column 1 unpenalized):");
    println!(
        "  converged in {} sweeps, objective {:.5}, {} nonzero",
        fit.n_iterations,
        fit.objective_value,
        fit.nonzero_count()
    );
    for k in 0..4 {
        println!("  beta[{k}] = {:+.4}", fit.coefficients[k]);
    }

    // the whole path, warm-started
    let path = solve_path(
        &x,
        &y,
        &vec![1.0; p],
        &PathOptions::with_n_lambda(30),
        &SolverOptions::default(),
    )?;
    println!("\npath ({} points): lambda -> nonzero count", path.len());
    for fit in path.iter().step_by(6) {
        println!("  {:>8.5} -> {}", fit.lambda_used, fit.nonzero_count());
    }

    // cross-validated penalty level
    let cv = cross_validate(&x, &y, &vec![1.0; p], &CvOptions::new(5, 42))?;
    println!("\n5-fold CV: lambda_min = {:.5}, lambda_1se = {:.5}", cv.lambda_min, cv.lambda_1se);
    let best = solve_penalized_ls(
        &x,
        &y,
        &PenaltySpec::uniform(cv.lambda_min, p),
        &SolverOptions::default(),
    )?;
    println!("fit at lambda_min: {} nonzero, intercept {:+.4}", best.nonzero_count(), best.intercept);
    Ok(())
}
