//! The three-step CoMMiT estimator.
//!
//! Step 1 fits one lasso per auxiliary outcome. Step 2 regresses the target
//! outcome on the fitted auxiliary signals `X b_j` (unpenalized) together
//! with `X` itself (L1-penalized), estimating the combination weights and a
//! sparse correction simultaneously. Step 3 composes the target coefficient
//! vector from the pieces. With no auxiliary outcomes the procedure is a
//! plain lasso of the target on `X`.

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{
    cross_validate, solve_penalized_ls, CvOptions, LambdaRule, PathOptions, PenalizedFit,
    PenaltySpec, SolverOptions,
};

/// One cohort: a shared covariate matrix, the target outcome, and any number
/// of auxiliary outcomes measured on the same samples.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y_target: Array1<f64>,
    pub y_aux: Vec<Array1<f64>>,
    pub feature_names: Vec<String>,
    /// Outcome names; entry 0 is the target, entries 1.. the auxiliaries.
    pub outcome_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        x: Array2<f64>,
        y_target: Array1<f64>,
        y_aux: Vec<Array1<f64>>,
        feature_names: Vec<String>,
        outcome_names: Vec<String>,
    ) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        if y_target.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "target outcome has length {} but X has {n} rows",
                y_target.len()
            )));
        }
        for (j, y) in y_aux.iter().enumerate() {
            if y.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "auxiliary outcome {j} has length {} but X has {n} rows",
                    y.len()
                )));
            }
        }
        if feature_names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {p} columns",
                feature_names.len()
            )));
        }
        if outcome_names.len() != y_aux.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} outcome names for {} outcomes",
                outcome_names.len(),
                y_aux.len() + 1
            )));
        }
        if x.iter().any(|v| !v.is_finite())
            || y_target.iter().any(|v| !v.is_finite())
            || y_aux.iter().any(|y| y.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite("dataset".into()));
        }
        Ok(Self { x, y_target, y_aux, feature_names, outcome_names })
    }

    /// Convenience constructor with generated names.
    pub fn unnamed(x: Array2<f64>, y_target: Array1<f64>, y_aux: Vec<Array1<f64>>) -> Result<Self> {
        let p = x.ncols();
        let feature_names = (1..=p).map(|k| format!("x{k}")).collect();
        let mut outcome_names = vec!["target".to_string()];
        outcome_names.extend((1..=y_aux.len()).map(|j| format!("aux{j}")));
        Self::new(x, y_target, y_aux, feature_names, outcome_names)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_aux(&self) -> usize {
        self.y_aux.len()
    }

    /// Restricts the dataset to a subset of rows (used by cross-validation).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select(Axis(0), rows),
            y_target: Array1::from_iter(rows.iter().map(|&i| self.y_target[i])),
            y_aux: self
                .y_aux
                .iter()
                .map(|y| Array1::from_iter(rows.iter().map(|&i| y[i])))
                .collect(),
            feature_names: self.feature_names.clone(),
            outcome_names: self.outcome_names.clone(),
        }
    }

    /// Keeps only the auxiliary outcomes at `indices` (target untouched).
    pub fn with_aux_subset(&self, indices: &[usize]) -> Self {
        let mut outcome_names = vec![self.outcome_names[0].clone()];
        outcome_names.extend(indices.iter().map(|&j| self.outcome_names[j + 1].clone()));
        Self {
            x: self.x.clone(),
            y_target: self.y_target.clone(),
            y_aux: indices.iter().map(|&j| self.y_aux[j].clone()).collect(),
            feature_names: self.feature_names.clone(),
            outcome_names,
        }
    }
}

/// How a penalty level is chosen for one of the lasso subproblems.
#[derive(Debug, Clone)]
pub enum LambdaPolicy {
    CrossValidated { k: usize, rule: LambdaRule },
    Fixed(f64),
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        LambdaPolicy::CrossValidated { k: 5, rule: LambdaRule::Min }
    }
}

#[derive(Debug, Clone)]
pub struct CommitConfig {
    pub aux_lambda: LambdaPolicy,
    pub w_lambda: LambdaPolicy,
    pub intercept: bool,
    /// Seed for every internal fold assignment. All cross-validations inside
    /// one fit share the fold split, so results do not depend on auxiliary
    /// order.
    pub seed: u64,
    pub path: PathOptions,
    pub solver: SolverOptions,
    /// Auxiliary signals with |correlation| above this against an earlier
    /// retained signal are dropped.
    pub collinearity_threshold: f64,
}

impl Default for CommitConfig {
    fn default() -> Self {
        Self {
            aux_lambda: LambdaPolicy::default(),
            w_lambda: LambdaPolicy::default(),
            intercept: true,
            seed: 0,
            path: PathOptions::default(),
            solver: SolverOptions::default(),
            collinearity_threshold: 0.999,
        }
    }
}

impl CommitConfig {
    pub fn no_intercept(seed: u64) -> Self {
        Self { intercept: false, seed, ..Default::default() }
    }

    pub(crate) fn solver_opts(&self) -> SolverOptions {
        SolverOptions { intercept: self.intercept, ..self.solver.clone() }
    }
}

/// Why an auxiliary outcome was excluded from step 2.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum DropReason {
    /// The step-1 lasso fit was identically zero.
    ZeroFit,
    /// The fitted signal X b_j has (near-)zero variance.
    DegenerateSignal,
    /// |correlation| with the signal of an earlier retained auxiliary
    /// exceeded the threshold.
    CollinearWith(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DroppedAux {
    pub index: usize,
    pub reason: DropReason,
}

/// Step-1 output: one lasso fit per auxiliary outcome, in input order, plus
/// the indices of all-zero fits.
#[derive(Debug, Clone)]
pub struct AuxiliaryFits {
    pub fits: Vec<PenalizedFit>,
    pub zero_fits: Vec<usize>,
}

/// Step-2 output.
#[derive(Debug, Clone)]
pub struct AlphaW {
    /// Combination weights, one per retained auxiliary.
    pub alpha: Array1<f64>,
    /// The sparse correction.
    pub w: Array1<f64>,
    pub intercept: f64,
    pub lambda_w: f64,
    pub retained: Vec<usize>,
    pub dropped: Vec<DroppedAux>,
    /// Solver metadata of the augmented problem.
    pub fit: PenalizedFit,
}

/// The composed estimator.
#[derive(Debug, Clone)]
pub struct CommitFit {
    /// Step-1 coefficient vectors of the retained auxiliaries, in retained order.
    pub aux_coefficients: Vec<Array1<f64>>,
    pub aux_intercepts: Vec<f64>,
    pub aux_lambdas: Vec<f64>,
    /// Combination weights aligned with `retained_aux`.
    pub alpha: Array1<f64>,
    /// The sparse correction from step 2.
    pub correction: Array1<f64>,
    /// The target coefficient vector: sum of weighted auxiliary coefficients
    /// plus the correction, accumulated in retained order.
    pub coefficients: Array1<f64>,
    pub intercept: f64,
    pub correction_lambda: f64,
    /// Original indices of the auxiliaries that entered step 2.
    pub retained_aux: Vec<usize>,
    pub dropped_aux: Vec<DroppedAux>,
}

impl CommitFit {
    pub fn n_retained(&self) -> usize {
        self.retained_aux.len()
    }
}

fn choose_lambda(
    x: &Array2<f64>,
    y: &Array1<f64>,
    factors: &[f64],
    policy: &LambdaPolicy,
    path: &PathOptions,
    solver: &SolverOptions,
    seed: u64,
) -> Result<f64> {
    match policy {
        LambdaPolicy::Fixed(v) => Ok(*v),
        LambdaPolicy::CrossValidated { k, rule } => {
            let opts = CvOptions { k: *k, seed, path: path.clone(), solver: solver.clone() };
            Ok(cross_validate(x, y, factors, &opts)?.lambda_at(*rule))
        }
    }
}

/// Step 1: a lasso per auxiliary outcome, penalty level chosen per policy.
/// The per-auxiliary problems are independent and run in parallel.
pub fn fit_auxiliary(dataset: &Dataset, config: &CommitConfig) -> Result<AuxiliaryFits> {
    if dataset.n_aux() == 0 {
        return Err(Error::InvalidParam(
            "fit_auxiliary needs at least one auxiliary outcome".into(),
        ));
    }
    let solver = config.solver_opts();
    let ones = vec![1.0; dataset.p()];
    let fits: Vec<Result<PenalizedFit>> = dataset
        .y_aux
        .par_iter()
        .enumerate()
        .map(|(j, y)| {
            let inner = || -> Result<PenalizedFit> {
                let lambda = choose_lambda(
                    &dataset.x,
                    y,
                    &ones,
                    &config.aux_lambda,
                    &config.path,
                    &solver,
                    config.seed,
                )?;
                solve_penalized_ls(
                    &dataset.x,
                    y,
                    &PenaltySpec::uniform(lambda, dataset.p()),
                    &solver,
                )
            };
            inner().map_err(|e| Error::InAuxiliary { index: j, source: Box::new(e) })
        })
        .collect();

    let mut out = Vec::with_capacity(fits.len());
    for fit in fits {
        out.push(fit?);
    }
    let zero_fits = out
        .iter()
        .enumerate()
        .filter_map(|(j, f)| (f.nonzero_count() == 0).then_some(j))
        .collect();
    Ok(AuxiliaryFits { fits: out, zero_fits })
}

/// |cosine| between two signals, centered when the model has an intercept.
fn signal_correlation(a: &Array1<f64>, b: &Array1<f64>, center: bool) -> f64 {
    let (am, bm) = if center {
        (a.mean().unwrap_or(0.0), b.mean().unwrap_or(0.0))
    } else {
        (0.0, 0.0)
    };
    let mut num = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        let u = a[i] - am;
        let v = b[i] - bm;
        num += u * v;
        na += u * u;
        nb += v * v;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (num / (na.sqrt() * nb.sqrt())).abs()
    }
}

fn signal_sd(a: &Array1<f64>, center: bool) -> f64 {
    let m = if center { a.mean().unwrap_or(0.0) } else { 0.0 };
    let n = a.len() as f64;
    (a.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
}

/// Step 2: joint estimation of the combination weights (unpenalized) and the
/// sparse correction (L1 at `lambda_w`) on the augmented design
/// `[X b_1 | ... | X b_J | X]`. Degenerate auxiliaries are dropped first;
/// errors only if none remain.
pub fn fit_alpha_w(
    dataset: &Dataset,
    aux_betas: &[Array1<f64>],
    config: &CommitConfig,
) -> Result<AlphaW> {
    let n = dataset.n();
    let p = dataset.p();
    for (j, b) in aux_betas.iter().enumerate() {
        if b.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "auxiliary coefficient vector {j} has length {}, expected {p}",
                b.len()
            )));
        }
    }

    // candidate signals and the degeneracy screen
    let mut retained: Vec<usize> = Vec::new();
    let mut dropped: Vec<DroppedAux> = Vec::new();
    let mut signals: Vec<Array1<f64>> = Vec::new();
    for (j, beta) in aux_betas.iter().enumerate() {
        if beta.iter().all(|v| *v == 0.0) {
            dropped.push(DroppedAux { index: j, reason: DropReason::ZeroFit });
            continue;
        }
        let signal = dataset.x.dot(beta);
        let sd = signal_sd(&signal, config.intercept);
        let rms = (signal.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        if sd <= 1e-10 * rms.max(f64::MIN_POSITIVE) {
            dropped.push(DroppedAux { index: j, reason: DropReason::DegenerateSignal });
            continue;
        }
        let mut collinear = None;
        for (pos, &earlier) in retained.iter().enumerate() {
            if signal_correlation(&signal, &signals[pos], config.intercept)
                > config.collinearity_threshold
            {
                collinear = Some(earlier);
                break;
            }
        }
        if let Some(earlier) = collinear {
            dropped.push(DroppedAux { index: j, reason: DropReason::CollinearWith(earlier) });
            continue;
        }
        retained.push(j);
        signals.push(signal);
    }
    if retained.is_empty() {
        return Err(Error::AllAuxiliariesDegenerate);
    }

    let j_ret = retained.len();
    let mut augmented = Array2::<f64>::zeros((n, j_ret + p));
    for (pos, signal) in signals.iter().enumerate() {
        augmented.column_mut(pos).assign(signal);
    }
    augmented.slice_mut(ndarray::s![.., j_ret..]).assign(&dataset.x);

    let mut factors = vec![0.0; j_ret];
    factors.extend(std::iter::repeat(1.0).take(p));

    let solver = config.solver_opts();
    let lambda_w = choose_lambda(
        &augmented,
        &dataset.y_target,
        &factors,
        &config.w_lambda,
        &config.path,
        &solver,
        config.seed,
    )?;
    let fit = solve_penalized_ls(
        &augmented,
        &dataset.y_target,
        &PenaltySpec::with_factors(lambda_w, factors),
        &solver,
    )?;

    let alpha = Array1::from_iter(fit.coefficients.iter().take(j_ret).copied());
    let w = Array1::from_iter(fit.coefficients.iter().skip(j_ret).copied());
    Ok(AlphaW { alpha, w, intercept: fit.intercept, lambda_w, retained, dropped, fit })
}

/// Runs the full three-step procedure. With no auxiliary outcomes the result
/// is the plain lasso of the target on `X` under the `w_lambda` policy.
pub fn fit_commit(dataset: &Dataset, config: &CommitConfig) -> Result<CommitFit> {
    let p = dataset.p();
    let solver = config.solver_opts();

    if dataset.n_aux() == 0 {
        let ones = vec![1.0; p];
        let lambda = choose_lambda(
            &dataset.x,
            &dataset.y_target,
            &ones,
            &config.w_lambda,
            &config.path,
            &solver,
            config.seed,
        )?;
        let fit = solve_penalized_ls(
            &dataset.x,
            &dataset.y_target,
            &PenaltySpec::uniform(lambda, p),
            &solver,
        )?;
        return Ok(CommitFit {
            aux_coefficients: Vec::new(),
            aux_intercepts: Vec::new(),
            aux_lambdas: Vec::new(),
            alpha: Array1::zeros(0),
            correction: fit.coefficients.clone(),
            coefficients: fit.coefficients.clone(),
            intercept: fit.intercept,
            correction_lambda: lambda,
            retained_aux: Vec::new(),
            dropped_aux: Vec::new(),
        });
    }

    let aux = fit_auxiliary(dataset, config)?;
    let betas: Vec<Array1<f64>> = aux.fits.iter().map(|f| f.coefficients.clone()).collect();
    let step2 = fit_alpha_w(dataset, &betas, config)?;

    // step 3: compose, accumulating in retained order, correction last
    let mut coefficients = Array1::<f64>::zeros(p);
    for (pos, &j) in step2.retained.iter().enumerate() {
        coefficients.scaled_add(step2.alpha[pos], &betas[j]);
    }
    coefficients += &step2.w;

    Ok(CommitFit {
        aux_coefficients: step2.retained.iter().map(|&j| betas[j].clone()).collect(),
        aux_intercepts: step2.retained.iter().map(|&j| aux.fits[j].intercept).collect(),
        aux_lambdas: step2.retained.iter().map(|&j| aux.fits[j].lambda_used).collect(),
        alpha: step2.alpha,
        correction: step2.w,
        coefficients,
        intercept: step2.intercept,
        correction_lambda: step2.lambda_w,
        retained_aux: step2.retained,
        dropped_aux: step2.dropped,
    })
}

/// Predicted target outcome for new covariate rows.
pub fn predict(fit: &CommitFit, x_new: &Array2<f64>) -> Result<Array1<f64>> {
    if x_new.ncols() != fit.coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "predict: X has {} columns, fit has {} coefficients",
            x_new.ncols(),
            fit.coefficients.len()
        )));
    }
    Ok(x_new.dot(&fit.coefficients) + fit.intercept)
}
