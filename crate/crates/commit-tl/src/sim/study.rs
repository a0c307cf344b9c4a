//! The replication engine: fits every requested method on every replication
//! and aggregates MSE, type-I error, and power.

use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_dataset, generate_truth, SimConfig, TruthSet};
use crate::error::{Error, Result};
use crate::estimator::{fit_commit, CommitConfig, CommitFit, Dataset, LambdaPolicy};
use crate::inference::{
    debias_coefficients, debias_commit, natural_lasso_variance, nodewise_residuals,
    per_coordinate_tests, InferenceOptions, NaturalLassoOptions, NodewiseOptions,
    NodewiseResiduals,
};
use crate::solver::{
    cross_validate, cross_validate_ridge, solve_penalized_ls, solve_ridge, CvOptions, LambdaRule,
    PathOptions, PenalizedFit, PenaltySpec, SolverOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Commit,
    Lasso,
    Ridge,
    LdpeLasso,
    CommitDebias,
}

impl Method {
    pub fn is_inference(self) -> bool {
        matches!(self, Method::LdpeLasso | Method::CommitDebias)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Commit => "commit",
            Method::Lasso => "lasso",
            Method::Ridge => "ridge",
            Method::LdpeLasso => "ldpe_lasso",
            Method::CommitDebias => "commit_debias",
        }
    }
}

/// Per-method aggregate over the completed replications.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// Squared estimation error per completed replication, in replication order.
    pub mse: Vec<f64>,
    pub mean_mse: f64,
    pub median_mse: f64,
    pub null_tests: usize,
    pub null_rejections: usize,
    pub nonnull_tests: usize,
    pub nonnull_rejections: usize,
    /// Pooled null rejection rate (inference methods only).
    pub type_i_rate: Option<f64>,
    /// Pooled non-null rejection rate (inference methods only).
    pub power: Option<f64>,
    /// Estimated noise variance per replication (inference methods only).
    pub sigma0_sq: Vec<f64>,
    /// Per-replication rejection counts (inference methods only).
    pub null_rejections_by_rep: Vec<usize>,
    pub nonnull_rejections_by_rep: Vec<usize>,
}

/// The deterministic study result: a pure function of the configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub methods: Vec<MethodSummary>,
    /// Substream index of each completed replication.
    pub replication_streams: Vec<u64>,
    pub failed_replications: Vec<(usize, String)>,
}

/// Wall-clock accounting, kept apart from the deterministic report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeSummary {
    pub per_method_ms: Vec<(Method, f64)>,
    pub total_ms: f64,
}

#[derive(Debug, Clone)]
pub struct StudyOutput {
    pub report: SimulationReport,
    pub runtime: RuntimeSummary,
}

#[derive(Debug, Clone)]
struct MethodRecord {
    mse: f64,
    null_rejections: usize,
    nonnull_rejections: usize,
    tested: bool,
    sigma0_sq: Option<f64>,
    elapsed_ms: f64,
}

// role tags for deriving independent fold seeds per replication
const ROLE_COMMIT: u64 = 1;
const ROLE_LASSO: u64 = 2;
const ROLE_RIDGE: u64 = 3;
const ROLE_NATURAL: u64 = 4;
const ROLE_ZETA: u64 = 5;

fn derive_seed(base: u64, replication: usize, role: u64) -> u64 {
    // SplitMix64 over (base, replication, role)
    let mut z = base
        .wrapping_add((replication as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(role.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn squared_error(estimate: &Array1<f64>, truth: &Array1<f64>) -> f64 {
    estimate.iter().zip(truth.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Lazily-computed quantities shared between methods within one replication.
struct RepCache<'a> {
    config: &'a SimConfig,
    data: &'a Dataset,
    rep: usize,
    lasso: Option<PenalizedFit>,
    commit: Option<CommitFit>,
    nodewise: Option<NodewiseResiduals>,
    natural_var: Option<f64>,
}

impl<'a> RepCache<'a> {
    fn new(config: &'a SimConfig, data: &'a Dataset, rep: usize) -> Self {
        Self { config, data, rep, lasso: None, commit: None, nodewise: None, natural_var: None }
    }

    fn path(&self) -> PathOptions {
        PathOptions::with_n_lambda(self.config.n_lambda)
    }

    fn lasso_fit(&mut self) -> Result<&PenalizedFit> {
        if self.lasso.is_none() {
            let ones = vec![1.0; self.data.p()];
            let solver = SolverOptions::no_intercept();
            let cv = cross_validate(
                &self.data.x,
                &self.data.y_target,
                &ones,
                &CvOptions {
                    k: self.config.cv_folds,
                    seed: derive_seed(self.config.seed, self.rep, ROLE_LASSO),
                    path: self.path(),
                    solver: solver.clone(),
                },
            )?;
            let fit = solve_penalized_ls(
                &self.data.x,
                &self.data.y_target,
                &PenaltySpec::uniform(cv.lambda_min, self.data.p()),
                &solver,
            )?;
            self.lasso = Some(fit);
        }
        Ok(self.lasso.as_ref().unwrap())
    }

    fn commit_config(&self) -> CommitConfig {
        CommitConfig {
            aux_lambda: LambdaPolicy::CrossValidated {
                k: self.config.cv_folds,
                rule: LambdaRule::Min,
            },
            w_lambda: LambdaPolicy::CrossValidated {
                k: self.config.cv_folds,
                rule: LambdaRule::Min,
            },
            intercept: false,
            seed: derive_seed(self.config.seed, self.rep, ROLE_COMMIT),
            path: self.path(),
            ..Default::default()
        }
    }

    fn commit_fit(&mut self) -> Result<&CommitFit> {
        if self.commit.is_none() {
            self.commit = Some(fit_commit(self.data, &self.commit_config())?);
        }
        Ok(self.commit.as_ref().unwrap())
    }

    fn nodewise(&mut self) -> Result<&NodewiseResiduals> {
        if self.nodewise.is_none() {
            let zeta =
                self.config.zeta.to_policy(derive_seed(self.config.seed, self.rep, ROLE_ZETA));
            // The nodewise regressions have weak signal, so their CV optimum
            // sits at moderate penalties; a short grid stopping at 5% of the
            // maximum skips the dense (and very slow) small-penalty tail.
            let opts = NodewiseOptions {
                zeta,
                path: PathOptions {
                    n_lambda: 25,
                    lambda_min_ratio: Some(0.02),
                    lambdas: None,
                },
                solver: SolverOptions::no_intercept(),
                ..Default::default()
            };
            self.nodewise = Some(nodewise_residuals(&self.data.x, &opts)?);
        }
        Ok(self.nodewise.as_ref().unwrap())
    }

    fn natural_options(&self) -> NaturalLassoOptions {
        NaturalLassoOptions {
            lambda: LambdaPolicy::CrossValidated {
                k: self.config.cv_folds,
                rule: LambdaRule::Min,
            },
            intercept: false,
            seed: derive_seed(self.config.seed, self.rep, ROLE_NATURAL),
            // keep the stabilizing floor from the default options
            path: PathOptions {
                n_lambda: self.config.n_lambda,
                ..NaturalLassoOptions::default().path
            },
            solver: SolverOptions::no_intercept(),
        }
    }

    fn natural_variance(&mut self) -> Result<f64> {
        if self.natural_var.is_none() {
            let (v, _) =
                natural_lasso_variance(&self.data.x, &self.data.y_target, &self.natural_options())?;
            self.natural_var = Some(v);
        }
        Ok(self.natural_var.unwrap())
    }
}

fn count_rejections(p_values: &[f64], alpha: f64, idx: &[usize]) -> usize {
    idx.iter().filter(|&&k| p_values[k] < alpha).count()
}

fn run_replication(
    config: &SimConfig,
    truth: &TruthSet,
    rep: usize,
    null_idx: &[usize],
    nonnull_idx: &[usize],
) -> Result<Vec<MethodRecord>> {
    let data = generate_dataset(config, truth, rep);
    let mut cache = RepCache::new(config, &data, rep);
    let mut records = Vec::with_capacity(config.methods.len());

    for &method in &config.methods {
        let start = Instant::now();
        let record = match method {
            Method::Commit => {
                let fit = cache.commit_fit()?;
                MethodRecord {
                    mse: squared_error(&fit.coefficients, &truth.beta0),
                    null_rejections: 0,
                    nonnull_rejections: 0,
                    tested: false,
                    sigma0_sq: None,
                    elapsed_ms: 0.0,
                }
            }
            Method::Lasso => {
                let fit = cache.lasso_fit()?;
                MethodRecord {
                    mse: squared_error(&fit.coefficients, &truth.beta0),
                    null_rejections: 0,
                    nonnull_rejections: 0,
                    tested: false,
                    sigma0_sq: None,
                    elapsed_ms: 0.0,
                }
            }
            Method::Ridge => {
                let grid: Vec<f64> = (0..40)
                    .map(|i| 10f64.powf(-5.0 + 8.0 * i as f64 / 39.0))
                    .rev()
                    .collect();
                let lambda = cross_validate_ridge(
                    &data.x,
                    &data.y_target,
                    &grid,
                    config.cv_folds,
                    derive_seed(config.seed, rep, ROLE_RIDGE),
                    false,
                )?;
                let fit = solve_ridge(&data.x, &data.y_target, lambda, false)?;
                MethodRecord {
                    mse: squared_error(&fit.coefficients, &truth.beta0),
                    null_rejections: 0,
                    nonnull_rejections: 0,
                    tested: false,
                    sigma0_sq: None,
                    elapsed_ms: 0.0,
                }
            }
            Method::LdpeLasso => {
                let sigma_sq = cache.natural_variance()?;
                let point = cache.lasso_fit()?.coefficients.clone();
                let z = cache.nodewise()?;
                let de = debias_coefficients(&point, &data.x, &data.y_target, z)?;
                let tau: Vec<f64> = z.tau.to_vec();
                let (_, p_values, _, _) = per_coordinate_tests(
                    de.as_slice().unwrap(),
                    &tau,
                    sigma_sq.sqrt(),
                    config.df.value(config.n),
                    config.alpha_level,
                )?;
                MethodRecord {
                    mse: squared_error(&de, &truth.beta0),
                    null_rejections: count_rejections(&p_values, config.alpha_level, null_idx),
                    nonnull_rejections: count_rejections(
                        &p_values,
                        config.alpha_level,
                        nonnull_idx,
                    ),
                    tested: true,
                    sigma0_sq: Some(sigma_sq),
                    elapsed_ms: 0.0,
                }
            }
            Method::CommitDebias => {
                let opts = InferenceOptions {
                    variance: config.variance,
                    alpha_level: config.alpha_level,
                    df: config.df,
                    natural: cache.natural_options(),
                };
                let fit = cache.commit_fit()?.clone();
                let z = cache.nodewise()?;
                let result = debias_commit(&fit, &data, z, &opts)?;
                let de = Array1::from(result.beta0_de.clone());
                MethodRecord {
                    mse: squared_error(&de, &truth.beta0),
                    null_rejections: count_rejections(
                        &result.p_values,
                        config.alpha_level,
                        null_idx,
                    ),
                    nonnull_rejections: count_rejections(
                        &result.p_values,
                        config.alpha_level,
                        nonnull_idx,
                    ),
                    tested: true,
                    sigma0_sq: Some(result.sigma0_hat * result.sigma0_hat),
                    elapsed_ms: 0.0,
                }
            }
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        records.push(MethodRecord { elapsed_ms: elapsed, ..record });
    }
    Ok(records)
}

/// Runs the whole study. Replications execute in parallel on counter-based
/// substreams; per-replication failures are excluded and reported, and the
/// study errors if more than 10% of replications fail.
pub fn run_study(config: &SimConfig) -> Result<StudyOutput> {
    config.validate()?;
    let start = Instant::now();
    let truth = generate_truth(config)?;
    let null_idx: Vec<usize> =
        (0..config.p).filter(|&k| truth.beta0[k] == 0.0).collect();
    let nonnull_idx: Vec<usize> =
        (0..config.p).filter(|&k| truth.beta0[k] != 0.0).collect();

    let outcomes: Vec<(usize, Result<Vec<MethodRecord>>)> = (0..config.n_replications)
        .into_par_iter()
        .map(|rep| (rep, run_replication(config, &truth, rep, &null_idx, &nonnull_idx)))
        .collect();

    let mut failed = Vec::new();
    let mut completed: Vec<(usize, Vec<MethodRecord>)> = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok(records) => completed.push((rep, records)),
            Err(e) => failed.push((rep, e.to_string())),
        }
    }
    if failed.len() * 10 > config.n_replications {
        return Err(Error::Numerical(format!(
            "{} of {} replications failed; first failure: {}",
            failed.len(),
            config.n_replications,
            failed[0].1
        )));
    }

    let mut methods = Vec::with_capacity(config.methods.len());
    let mut per_method_ms = Vec::with_capacity(config.methods.len());
    for (pos, &method) in config.methods.iter().enumerate() {
        let mut mse = Vec::with_capacity(completed.len());
        let mut sigma0_sq = Vec::new();
        let mut null_rejections = 0;
        let mut nonnull_rejections = 0;
        let mut null_by_rep = Vec::new();
        let mut nonnull_by_rep = Vec::new();
        let mut tested_reps = 0;
        let mut elapsed = 0.0;
        for (_, records) in &completed {
            let r = &records[pos];
            mse.push(r.mse);
            if let Some(s) = r.sigma0_sq {
                sigma0_sq.push(s);
            }
            if r.tested {
                tested_reps += 1;
                null_rejections += r.null_rejections;
                nonnull_rejections += r.nonnull_rejections;
                null_by_rep.push(r.null_rejections);
                nonnull_by_rep.push(r.nonnull_rejections);
            }
            elapsed += r.elapsed_ms;
        }
        let null_tests = tested_reps * null_idx.len();
        let nonnull_tests = tested_reps * nonnull_idx.len();
        let mean_mse = mse.iter().sum::<f64>() / mse.len().max(1) as f64;
        let mut sorted = mse.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median_mse = if sorted.is_empty() {
            f64::NAN
        } else if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        methods.push(MethodSummary {
            method,
            mse,
            mean_mse,
            median_mse,
            null_tests,
            null_rejections,
            nonnull_tests,
            nonnull_rejections,
            type_i_rate: (null_tests > 0)
                .then(|| null_rejections as f64 / null_tests as f64),
            power: (nonnull_tests > 0)
                .then(|| nonnull_rejections as f64 / nonnull_tests as f64),
            sigma0_sq,
            null_rejections_by_rep: null_by_rep,
            nonnull_rejections_by_rep: nonnull_by_rep,
        });
        per_method_ms.push((method, elapsed));
    }

    let report = SimulationReport {
        config: config.clone(),
        methods,
        replication_streams: completed.iter().map(|(rep, _)| *rep as u64).collect(),
        failed_replications: failed,
    };
    let runtime =
        RuntimeSummary { per_method_ms, total_ms: start.elapsed().as_secs_f64() * 1e3 };
    Ok(StudyOutput { report, runtime })
}
