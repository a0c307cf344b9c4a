//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! ```bash
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! The statistical criteria run full replication studies and take tens of
//! minutes on a small machine. Criterion 6 encodes an idealized consistency
//! target for the noise-variance estimator that the bundled hard
//! configuration does not meet; it is expected to fail and documents the
//! measured values (see the README's "known limitations").

use std::process::Command;
use std::sync::LazyLock;

use commit_tl::estimator::{fit_commit, CommitConfig, Dataset, LambdaPolicy};
use commit_tl::inference::{
    debias_coefficients, natural_lasso_variance, nodewise_residuals, NaturalLassoOptions,
    NodewiseOptions, ZetaPolicy,
};
use commit_tl::select::{select_auxiliary, SelectionConfig};
use commit_tl::sim::{generate_dataset, generate_truth, run_study, Method, SimConfig, ZetaChoice};
use commit_tl::solver::{
    cross_validate, solve_penalized_ls, CvOptions, PathOptions, PenaltySpec,
    SolverOptions,
};
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn verdict(number: u32, name: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {number} {name}: {} - {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({name}): {details}");
}

fn estimation_config(theta2: f64, seed: u64) -> SimConfig {
    SimConfig {
        n: 100,
        p: 300,
        s: 20,
        theta1: 0.3,
        theta2,
        rho: 0.3,
        sigma0: 0.2,
        sigma1: 0.1,
        sigma2: 0.1,
        n_replications: 50,
        alpha_level: 0.05,
        seed,
        methods: vec![Method::Commit, Method::Lasso, Method::Ridge],
        cv_folds: 5,
        n_lambda: 100,
        zeta: ZetaChoice::Plugin { scale: 1.0 },
        df: Default::default(),
        variance: Default::default(),
    }
}

fn inference_config() -> SimConfig {
    SimConfig {
        n: 100,
        p: 300,
        s: 20,
        theta1: 1.0,
        theta2: 0.4,
        rho: 0.3,
        sigma0: 2.0,
        sigma1: 1.0,
        sigma2: 1.0,
        n_replications: 100,
        alpha_level: 0.05,
        seed: 20260808,
        methods: vec![Method::CommitDebias, Method::LdpeLasso],
        cv_folds: 5,
        n_lambda: 100,
        zeta: ZetaChoice::Plugin { scale: 1.0 },
        df: Default::default(),
        variance: Default::default(),
    }
}

/// The inference study backing criteria 2 and 3, run once.
static INFERENCE_STUDY: LazyLock<commit_tl::sim::SimulationReport> = LazyLock::new(|| {
    run_study(&inference_config()).expect("inference study must complete").report
});

#[test]
fn criterion_1_estimation_dominance() {
    for (idx, theta2) in [0.0, 0.2].into_iter().enumerate() {
        let config = estimation_config(theta2, 7011 + idx as u64);
        let report = run_study(&config).expect("estimation study must complete").report;
        let median = |m: Method| {
            report
                .methods
                .iter()
                .find(|s| s.method == m)
                .map(|s| s.median_mse)
                .expect("method present")
        };
        let (commit, lasso, ridge) =
            (median(Method::Commit), median(Method::Lasso), median(Method::Ridge));
        verdict(
            1,
            "estimation dominance",
            commit < lasso && commit < ridge,
            &format!(
                "theta2 = {theta2}: median MSE commit {commit:.4} vs lasso {lasso:.4}, \
                 ridge {ridge:.4} over {} replications",
                report.replication_streams.len()
            ),
        );
    }
}

#[test]
fn criterion_2_type_i_error_control() {
    let report = &*INFERENCE_STUDY;
    let commit =
        report.methods.iter().find(|s| s.method == Method::CommitDebias).expect("present");
    let rate = commit.type_i_rate.expect("inference method");
    let n_tests = commit.null_tests as f64;
    let bound = 0.05 + 2.0 * (0.05f64 * 0.95 / n_tests).sqrt();
    verdict(
        2,
        "type-I error control",
        rate <= bound,
        &format!(
            "pooled null rejection rate {rate:.4} vs bound {bound:.4} \
             ({} rejections / {} tests)",
            commit.null_rejections, commit.null_tests
        ),
    );
}

#[test]
fn criterion_3_power_ordering() {
    let report = &*INFERENCE_STUDY;
    let get = |m: Method| report.methods.iter().find(|s| s.method == m).expect("present");
    let commit = get(Method::CommitDebias);
    let ldpe = get(Method::LdpeLasso);
    let p_c = commit.power.expect("inference method");
    let p_l = ldpe.power.expect("inference method");
    let n = commit.nonnull_tests as f64;
    let pooled = 0.5 * (p_c + p_l);
    let se = (2.0 * pooled * (1.0 - pooled) / n).sqrt();
    verdict(
        3,
        "power ordering",
        p_c > p_l && (p_c - p_l) > 2.0 * se,
        &format!(
            "power commit {p_c:.4} vs ldpe {p_l:.4}; difference {:.4} vs 2*SE {:.4}",
            p_c - p_l,
            2.0 * se
        ),
    );
}

// -- criterion 4: the dense oracle ------------------------------------------

fn center(
    x: &Array2<f64>,
    y: &Array1<f64>,
    intercept: bool,
) -> (Array2<f64>, Array1<f64>, Vec<f64>, f64) {
    let n = x.nrows();
    let p = x.ncols();
    if !intercept {
        return (x.clone(), y.clone(), vec![0.0; p], 0.0);
    }
    let xm: Vec<f64> = (0..p).map(|k| x.column(k).sum() / n as f64).collect();
    let ym = y.sum() / n as f64;
    let mut xc = x.clone();
    for k in 0..p {
        xc.column_mut(k).iter_mut().for_each(|v| *v -= xm[k]);
    }
    (xc, y.mapv(|v| v - ym), xm, ym)
}

/// Brute-force weighted-lasso solver: enumerates every sign pattern of the
/// penalized coordinates, solves the corresponding KKT equality system
/// exactly, and returns the unique candidate consistent with all KKT
/// conditions. Independent of the coordinate-descent path.
fn lasso_sign_oracle(
    x: &Array2<f64>,
    y: &Array1<f64>,
    lambda: f64,
    factors: &[f64],
    intercept: bool,
) -> Option<(Vec<f64>, f64)> {
    let n = x.nrows();
    let p = x.ncols();
    let (xc, yc, xm, ym) = center(x, y, intercept);
    let penalized: Vec<usize> = (0..p).filter(|&k| lambda * factors[k] > 0.0).collect();
    let free: Vec<usize> = (0..p).filter(|&k| lambda * factors[k] == 0.0).collect();
    let n_f = n as f64;

    let patterns = 3usize.pow(penalized.len() as u32);
    'pattern: for code in 0..patterns {
        let mut signs = vec![0i8; p];
        let mut c = code;
        for &k in &penalized {
            signs[k] = [0i8, 1, -1][c % 3];
            c /= 3;
        }
        let active: Vec<usize> = (0..p)
            .filter(|&k| free.contains(&k) || signs[k] != 0)
            .collect();
        let m = active.len();
        let mut beta = vec![0.0; p];
        if m > 0 {
            let mut gram = Array2::<f64>::zeros((m, m));
            let mut rhs = Array1::<f64>::zeros(m);
            for a in 0..m {
                let ka = active[a];
                for b in 0..m {
                    let kb = active[b];
                    gram[(a, b)] = xc.column(ka).dot(&xc.column(kb)) / n_f;
                }
                rhs[a] =
                    xc.column(ka).dot(&yc) / n_f - lambda * factors[ka] * signs[ka] as f64;
            }
            // Gauss elimination with partial pivoting
            let mut aug = gram.clone();
            let mut b = rhs.clone();
            for col in 0..m {
                let mut pivot = col;
                for r in (col + 1)..m {
                    if aug[(r, col)].abs() > aug[(pivot, col)].abs() {
                        pivot = r;
                    }
                }
                if aug[(pivot, col)].abs() < 1e-12 {
                    continue 'pattern;
                }
                if pivot != col {
                    for cc in 0..m {
                        let tmp = aug[(col, cc)];
                        aug[(col, cc)] = aug[(pivot, cc)];
                        aug[(pivot, cc)] = tmp;
                    }
                    b.swap(col, pivot);
                }
                for r in (col + 1)..m {
                    let f = aug[(r, col)] / aug[(col, col)];
                    for cc in col..m {
                        aug[(r, cc)] -= f * aug[(col, cc)];
                    }
                    b[r] -= f * b[col];
                }
            }
            let mut sol = vec![0.0; m];
            for r in (0..m).rev() {
                let mut v = b[r];
                for cc in (r + 1)..m {
                    v -= aug[(r, cc)] * sol[cc];
                }
                sol[r] = v / aug[(r, r)];
            }
            for (a, &k) in active.iter().enumerate() {
                beta[k] = sol[a];
            }
        }

        // sign consistency on active penalized coordinates
        for &k in &penalized {
            if signs[k] != 0 && beta[k] * f64::from(signs[k]) < -1e-12 {
                continue 'pattern;
            }
        }
        // subgradient bound on inactive coordinates
        let mut residual = yc.clone();
        for k in 0..p {
            if beta[k] != 0.0 {
                for i in 0..n {
                    residual[i] -= xc[(i, k)] * beta[k];
                }
            }
        }
        for &k in &penalized {
            if signs[k] == 0 {
                let g = xc.column(k).dot(&residual) / n_f;
                if g.abs() > lambda * factors[k] + 1e-10 {
                    continue 'pattern;
                }
            }
        }
        let b0 = if intercept {
            ym - beta.iter().zip(&xm).map(|(b, m)| b * m).sum::<f64>()
        } else {
            0.0
        };
        return Some((beta, b0));
    }
    None
}

#[test]
fn criterion_4_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst_cd = 0.0f64;
    let mut worst_debias = 0.0f64;
    for trial in 0..100 {
        let n = rng.random_range(20..=60);
        let p = rng.random_range(2..=5);
        let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>() * 2.0 - 1.0);
        let beta_true: Vec<f64> =
            (0..p).map(|k| if k % 2 == 0 { rng.random::<f64>() * 2.0 - 1.0 } else { 0.0 }).collect();
        let y = Array1::from_shape_fn(n, |i| {
            (0..p).map(|k| x[(i, k)] * beta_true[k]).sum::<f64>()
                + 0.3 * (rng.random::<f64>() - 0.5)
        });
        let intercept = trial % 2 == 0;
        let mut factors = vec![1.0; p];
        if trial % 3 == 0 && p > 2 {
            factors[0] = 0.0;
            factors[1] = 1.0 + rng.random::<f64>();
        }
        let lambda = 0.02 + rng.random::<f64>() * 0.15;

        let penalty = PenaltySpec::with_factors(lambda, factors.clone());
        let opts = SolverOptions { intercept, tol: 1e-10, ..Default::default() };
        let fit = solve_penalized_ls(&x, &y, &penalty, &opts).expect("solver");
        let (oracle, oracle_b0) =
            lasso_sign_oracle(&x, &y, lambda, &factors, intercept).expect("oracle pattern found");
        for k in 0..p {
            worst_cd = worst_cd.max((fit.coefficients[k] - oracle[k]).abs());
        }
        worst_cd = worst_cd.max((fit.intercept - oracle_b0).abs());

        // direct evaluation of the debiasing formula
        let z = nodewise_residuals(&x, &NodewiseOptions::with_zeta(ZetaPolicy::Plugin { scale: 1.0 }))
            .expect("nodewise");
        let fit_vec = Array1::from_shape_fn(p, |_| rng.random::<f64>() - 0.5);
        let de = debias_coefficients(&fit_vec, &x, &y, &z).expect("debias");
        for l in 0..p {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                let mut xb = 0.0;
                for k in 0..p {
                    xb += x[(i, k)] * fit_vec[k];
                }
                num += z.residuals[(i, l)] * (y[i] - xb);
                den += z.residuals[(i, l)] * x[(i, l)];
            }
            worst_debias = worst_debias.max((de[l] - (fit_vec[l] + num / den)).abs());
        }
    }
    verdict(
        4,
        "oracle equivalence",
        worst_cd < 1e-6 && worst_debias < 1e-12,
        &format!(
            "100 instances: max |cd - sign-enumeration oracle| = {worst_cd:.2e} (tol 1e-6), \
             max |debias - direct formula| = {worst_debias:.2e} (tol 1e-12)"
        ),
    );
}

#[test]
fn criterion_5_degeneracy_fixed_points() {
    // (a) no auxiliaries: bitwise identical to the plain lasso
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let x = Array2::from_shape_fn((60, 15), |_| rng.random::<f64>() * 2.0 - 1.0);
    let y = Array1::from_shape_fn(60, |i| x[(i, 0)] - 0.7 * x[(i, 3)] + 0.2 * rng.random::<f64>());
    let dataset = Dataset::unnamed(x.clone(), y.clone(), vec![]).unwrap();
    let config = CommitConfig { seed: 9, ..Default::default() };
    let fit = fit_commit(&dataset, &config).unwrap();
    let cv = cross_validate(
        &x,
        &y,
        &vec![1.0; 15],
        &CvOptions { k: 5, seed: 9, path: PathOptions::default(), solver: SolverOptions::default() },
    )
    .unwrap();
    let plain = solve_penalized_ls(
        &x,
        &y,
        &PenaltySpec::uniform(cv.lambda_min, 15),
        &SolverOptions::default(),
    )
    .unwrap();
    let bitwise = fit.coefficients.as_slice().unwrap() == plain.coefficients.as_slice().unwrap()
        && fit.intercept == plain.intercept;

    // (b) n > p, zero penalties: debiasing leaves OLS untouched
    let x2 = Array2::from_shape_fn((50, 6), |_| rng.random::<f64>() * 2.0 - 1.0);
    let y2 = Array1::from_shape_fn(50, |i| x2[(i, 1)] + 0.1 * rng.random::<f64>());
    let ols = solve_penalized_ls(
        &x2,
        &y2,
        &PenaltySpec::uniform(0.0, 6),
        &SolverOptions::no_intercept(),
    )
    .unwrap();
    let z = nodewise_residuals(&x2, &NodewiseOptions::with_zeta(ZetaPolicy::Fixed(0.0))).unwrap();
    let de = debias_coefficients(&ols.coefficients, &x2, &y2, &z).unwrap();
    let ols_fixed_point = (0..6).all(|k| (de[k] - ols.coefficients[k]).abs() < 1e-8);

    // (c) noiseless self-auxiliary: unit weight, zero correction
    let x3 = Array2::from_shape_fn((60, 8), |_| rng.random::<f64>() * 2.0 - 1.0);
    let beta = Array1::from_shape_fn(8, |k| if k < 3 { 1.0 } else { 0.0 });
    let y3 = x3.dot(&beta);
    let self_data = Dataset::unnamed(x3, y3.clone(), vec![y3]).unwrap();
    let self_fit = fit_commit(
        &self_data,
        &CommitConfig {
            aux_lambda: LambdaPolicy::Fixed(0.0),
            w_lambda: LambdaPolicy::Fixed(10.0),
            ..Default::default()
        },
    )
    .unwrap();
    let self_ok = (self_fit.alpha[0] - 1.0).abs() < 1e-6
        && self_fit.correction.iter().all(|v| v.abs() < 1e-6);

    verdict(
        5,
        "degeneracy fixed points",
        bitwise && ols_fixed_point && self_ok,
        &format!(
            "J=0 bitwise: {bitwise}; OLS debias fixed point: {ols_fixed_point}; \
             self-auxiliary alpha = {:.8}, max |w| = {:.2e}",
            self_fit.alpha[0],
            self_fit.correction.iter().fold(0.0f64, |a, v| a.max(v.abs()))
        ),
    );
}

#[test]
fn criterion_6_variance_estimator_consistency() {
    // The criterion asks the noise-variance estimator's mean to land within
    // 15% of the true 4.0 at the hard inference configuration. The estimator
    // is value-of-penalized-objective: mean squared residual plus
    // 2*lambda*||beta||_1; with ||beta0||_1 = 68 its penalty term alone
    // exceeds the target for any penalty large enough to avoid interpolation,
    // so this check documents the measured bias rather than passing.
    let config = inference_config();
    let truth = generate_truth(&config).unwrap();
    let mut shipped = Vec::with_capacity(100);
    let mut unfloored = Vec::with_capacity(100);
    for rep in 0..100 {
        let data = generate_dataset(&config, &truth, rep);
        let base = NaturalLassoOptions {
            intercept: false,
            seed: 606 + rep as u64,
            solver: SolverOptions::no_intercept(),
            ..Default::default()
        };
        let (v, _) = natural_lasso_variance(&data.x, &data.y_target, &base).unwrap();
        shipped.push(v);
        let free_path = NaturalLassoOptions {
            path: PathOptions::default(),
            ..base
        };
        let (v, _) = natural_lasso_variance(&data.x, &data.y_target, &free_path).unwrap();
        unfloored.push(v);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let shipped_mean = mean(&shipped);
    let unfloored_mean = mean(&unfloored);
    let pass = (shipped_mean - 4.0).abs() <= 0.15 * 4.0;
    verdict(
        6,
        "variance estimator consistency",
        pass,
        &format!(
            "mean sigma0^2 over 100 replications: {shipped_mean:.2} (stabilized path) / \
             {unfloored_mean:.2} (unrestricted CV), target 4.0 +/- 0.6; the penalty term \
             2*lambda*||beta||_1 is lower-bounded near 8 at any non-interpolating penalty, \
             so the target is unattainable at this configuration"
        ),
    );
}

#[test]
fn criterion_7_selection_sanity() {
    let mut successes = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let n = 100;
        let p = 24;
        let x = Array2::from_shape_fn((n, p), |_| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        });
        let beta = Array1::from_shape_fn(p, |k| if k < 4 { 1.0 } else { 0.0 });
        let mut noise_vec = |scale: f64| {
            Array1::from_shape_fn(n, |_| {
                let u1: f64 = rng.random::<f64>().max(1e-12);
                let u2: f64 = rng.random();
                scale * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
        };
        let y0 = x.dot(&beta) + noise_vec(0.3);
        let copy = y0.clone();
        let pool = Dataset::unnamed(
            x,
            y0,
            vec![noise_vec(1.0), copy, noise_vec(1.0), noise_vec(1.0)],
        )
        .unwrap();
        let result = select_auxiliary(
            &pool,
            &SelectionConfig {
                seed,
                k_folds: 10,
                commit: CommitConfig { seed, ..Default::default() },
                ..Default::default()
            },
        )
        .unwrap();
        if result.m_opt == 1 && result.selected == vec![1] {
            successes += 1;
        }
    }
    verdict(
        7,
        "selection sanity",
        successes >= 95,
        &format!("target copy selected alone in {successes}/100 seeds (needs >= 95)"),
    );
}

// -- criterion 8: CLI determinism --------------------------------------------

fn run_cli(args: &[&str], dir: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_commit-tl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// JSON bytes with the `meta` object removed, reserialized canonically.
fn strip_meta(bytes: &[u8]) -> String {
    let mut value: serde_json::Value = serde_json::from_slice(bytes).expect("valid JSON");
    if let Some(obj) = value.as_object_mut() {
        obj.remove("meta");
    }
    serde_json::to_string_pretty(&value).expect("serializable")
}

fn write_synthetic_tables(dir: &std::path::Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let n = 30;
    let p = 12;
    let mut microbe = String::from("sample");
    for j in 1..=p {
        microbe.push_str(&format!(",genus_{j}"));
    }
    microbe.push('\n');
    let mut counts = vec![vec![0.0; p]; n];
    for (i, row) in counts.iter_mut().enumerate() {
        microbe.push_str(&format!("s{i}"));
        for v in row.iter_mut() {
            *v = (rng.random::<f64>() * 150.0).floor();
            microbe.push_str(&format!(",{v}"));
        }
        microbe.push('\n');
    }
    std::fs::write(dir.join("microbes.csv"), microbe).unwrap();

    let mut metab = String::from("sample,acid_a,acid_b,acid_c\n");
    for (i, row) in counts.iter().enumerate() {
        let signal: f64 = row[0].ln_1p() - row[1].ln_1p();
        let a = (0.5 * signal).exp() * (4.0 + rng.random::<f64>());
        let b = (0.4 * signal).exp() * (3.0 + rng.random::<f64>());
        let c = 2.0 + rng.random::<f64>();
        metab.push_str(&format!("s{i},{a},{b},{c}\n"));
    }
    std::fs::write(dir.join("metabolites.csv"), metab).unwrap();

    let config = serde_json::json!({
        "microbe_csv": "microbes.csv",
        "metabolite_csv": "metabolites.csv",
        "target": "acid_a",
        "candidates": ["acid_b", "acid_c"],
        "selection": { "r0": 0.3, "p0": 0.5, "k_folds": 3, "seed": 5 },
        "solver": { "n_lambda": 40, "cv_folds": 3, "seed": 5 },
        "inference": { "zeta": { "policy": "plugin", "scale": 1.0 }, "seed": 5 }
    });
    std::fs::write(
        dir.join("analysis.json"),
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();

    let sim = serde_json::json!({
        "n": 40, "p": 24, "s": 4, "theta1": 0.6, "theta2": 0.2, "rho": 0.3,
        "sigma0": 0.2, "sigma1": 0.1, "sigma2": 0.1,
        "n_replications": 2, "seed": 31,
        "methods": ["commit", "lasso"],
        "cv_folds": 3, "n_lambda": 30
    });
    std::fs::write(dir.join("sim.json"), serde_json::to_string_pretty(&sim).unwrap()).unwrap();
}

#[test]
fn criterion_8_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_tables(dir.path());

    let jobs: Vec<(&str, Vec<&str>, Vec<&str>)> = vec![
        (
            "simulate",
            vec!["simulate", "--config", "sim.json", "--out"],
            vec!["simulation_report.json"],
        ),
        ("fit", vec!["fit", "--config", "analysis.json", "--out"], vec!["fit.json"]),
        (
            "infer",
            vec!["infer", "--config", "analysis.json", "--out"],
            vec!["infer.json", "infer.csv"],
        ),
        (
            "select-aux",
            vec!["select-aux", "--config", "analysis.json", "--out"],
            vec!["selection.json"],
        ),
    ];
    let mut all_ok = true;
    let mut details = Vec::new();
    for (name, args, outputs) in jobs {
        let mut contents: Vec<Vec<String>> = Vec::new();
        for run in ["run_a", "run_b"] {
            let mut full = args.clone();
            full.push(run);
            let out = run_cli(&full, dir.path());
            assert!(
                out.status.success(),
                "{name} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let mut files = Vec::new();
            for file in &outputs {
                let bytes = std::fs::read(dir.path().join(run).join(file)).unwrap();
                if file.ends_with(".json") {
                    files.push(strip_meta(&bytes));
                } else {
                    files.push(String::from_utf8(bytes).unwrap());
                }
            }
            contents.push(files);
        }
        let identical = contents[0] == contents[1];
        all_ok &= identical;
        details.push(format!("{name}: {}", if identical { "identical" } else { "DIFFERS" }));

        // the simulation CSV is covered above; also pin the records file
        if name == "simulate" {
            let a = std::fs::read(dir.path().join("run_a/simulation_records.csv")).unwrap();
            let b = std::fs::read(dir.path().join("run_b/simulation_records.csv")).unwrap();
            all_ok &= a == b;
        }
    }
    verdict(8, "CLI determinism", all_ok, &details.join(", "));
}
