//! A desk-scale replication study comparing the estimator against lasso,
//! ridge, and debiased-lasso baselines.
//!
//! ```bash
//! cargo run --release --example simulation_study
//! ```

use commit_tl::sim::{information_score, generate_truth, run_study, Method, SimConfig};

fn main() -> commit_tl::Result<()> {
    let config = SimConfig {
        n: 100,
        p: 80,
        s: 8,
        theta1: 0.5,
        theta2: 0.2,
        rho: 0.3,
        sigma0: 0.3,
        sigma1: 0.15,
        sigma2: 0.15,
        n_replications: 10,
        alpha_level: 0.05,
        seed: 2026,
        methods: vec![
            Method::Commit,
            Method::Lasso,
            Method::Ridge,
            Method::CommitDebias,
            Method::LdpeLasso,
        ],
        cv_folds: 5,
        n_lambda: 60,
        zeta: Default::default(),
        df: Default::default(),
        variance: Default::default(),
    };

    let truth = generate_truth(&config)?;
    println!(
        "truth: ||beta0||_0 = {}, misalignment h = {:.2}, information scores ({:.3}, {:.3})",
        truth.beta0.iter().filter(|v| **v != 0.0).count(),
        truth.h_true,
        information_score(&truth.beta0, &truth.beta1)?,
        information_score(&truth.beta0, &truth.beta2)?,
    );

    let out = run_study(&config)?;
    println!(
        "\n{} replications ({} failed), total {:.1}s",
        config.n_replications,
        out.report.failed_replications.len(),
        out.runtime.total_ms / 1e3
    );
    println!(
        "{:14} {:>12} {:>12} {:>8} {:>8}",
        "method", "median MSE", "mean MSE", "type-I", "power"
    );
    for m in &out.report.methods {
        println!(
            "{:14} {:>12.4} {:>12.4} {:>8} {:>8}",
            m.method.name(),
            m.median_mse,
            m.mean_mse,
            m.type_i_rate.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
            m.power.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    Ok(())
}
