//! Data-driven choice of the auxiliary set: screening by the correlation of
//! feature-correlation profiles, then cross-validated forward inclusion.
//!
//! ```bash
//! cargo run --example select_auxiliary
//! ```

use commit_tl::estimator::{CommitConfig, Dataset};
use commit_tl::select::{microbial_correlation, select_auxiliary, SelectionConfig};
use commit_tl::sim::{generate_dataset, generate_truth, Method, SimConfig};
use ndarray::Array1;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> commit_tl::Result<()> {
    // target plus a pool of five candidates of varying usefulness
    let config = SimConfig {
        n: 90,
        p: 40,
        s: 5,
        theta1: 0.6,
        theta2: 0.1,
        rho: 0.3,
        sigma0: 0.3,
        sigma1: 0.2,
        sigma2: 0.2,
        n_replications: 1,
        alpha_level: 0.05,
        seed: 9,
        methods: vec![Method::Commit],
        cv_folds: 5,
        n_lambda: 60,
        zeta: Default::default(),
        df: Default::default(),
        variance: Default::default(),
    };
    let truth = generate_truth(&config)?;
    let base = generate_dataset(&config, &truth, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut noise = |scale: f64| {
        Array1::from_shape_fn(base.n(), |_| scale * (rng.random::<f64>() * 2.0 - 1.0))
    };

    let candidates = vec![
        base.y_aux[0].clone(),                    // truly informative
        base.y_aux[1].clone(),                    // truly informative
        &base.y_target + &noise(0.8),             // noisy copy of the target
        noise(1.0),                               // pure noise
        noise(1.0),                               // pure noise
    ];
    let names: Vec<String> = ["aux_a", "aux_b", "noisy_copy", "noise_1", "noise_2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let pool = Dataset::new(
        base.x.clone(),
        base.y_target.clone(),
        candidates,
        base.feature_names.clone(),
        std::iter::once("target".to_string()).chain(names.iter().cloned()).collect(),
    )?;

    let mc = microbial_correlation(&pool.x, &pool.y_target, &pool.y_aux)?;
    println!("screening statistics:");
    for (j, name) in names.iter().enumerate() {
        println!(
            "  {:10} |rho| = {:.3}  p = {:.2e}",
            name, mc.r_hat[j], mc.p_hat[j]
        );
    }

    let result = select_auxiliary(
        &pool,
        &SelectionConfig {
            seed: 4,
            commit: CommitConfig::no_intercept(4),
            ..Default::default()
        },
    )?;
    println!("\nscreened (strongest first): {:?}", result.screened);
    for (m, mse) in result.mse_by_m.iter().enumerate() {
        let marker = if m + 1 == result.m_opt { " <- m_opt" } else { "" };
        println!("  CV MSE with {} auxiliaries: {:.4}{}", m + 1, mse, marker);
    }
    let selected_names: Vec<&str> =
        result.selected.iter().map(|&j| names[j].as_str()).collect();
    println!("selected: {selected_names:?}");
    Ok(())
}
