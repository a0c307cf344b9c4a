//! Synthetic-data generation and the replication engine.
//!
//! The generator draws covariate rows from a mean-zero Gaussian with AR(1)
//! covariance `rho^|j-k|` and builds two auxiliary coefficient vectors on
//! disjoint blocks plus a sparse misalignment block, so the target vector is
//! a linear combination of the auxiliaries plus a correction. Replications
//! use counter-based substreams of one seed: parallel and serial runs agree.

mod study;

pub use study::{run_study, Method, MethodSummary, RuntimeSummary, SimulationReport, StudyOutput};

pub use crate::inference::ZetaChoice;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::Dataset;
use crate::inference::{DfConvention, VarianceMethod};

// The simulation default trades the per-column CV of the analysis pipeline
// for the plugin rate: hundreds of nodewise fits per replication make CV
// expensive, and the test calibration is governed by the (conservative)
// variance estimate rather than the penalty choice here.
fn default_zeta() -> ZetaChoice {
    ZetaChoice::Plugin { scale: 1.0 }
}

fn default_cv_folds() -> usize {
    5
}

fn default_n_lambda() -> usize {
    100
}

fn default_alpha() -> f64 {
    0.05
}

fn default_methods() -> Vec<Method> {
    vec![Method::Commit, Method::Lasso, Method::Ridge]
}

fn default_replications() -> usize {
    50
}

/// Full description of one simulation study; a pure function of this struct
/// (seed included) determines the whole report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    /// Block size of the coefficient layout (requires 4s <= p).
    pub s: usize,
    /// Signal size of the auxiliary blocks.
    pub theta1: f64,
    /// Size of the misalignment block (0 = perfectly aligned target).
    pub theta2: f64,
    /// AR(1) correlation of the covariates.
    pub rho: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    #[serde(default = "default_replications")]
    pub n_replications: usize,
    #[serde(default = "default_alpha")]
    pub alpha_level: f64,
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_cv_folds")]
    pub cv_folds: usize,
    #[serde(default = "default_n_lambda")]
    pub n_lambda: usize,
    #[serde(default = "default_zeta")]
    pub zeta: ZetaChoice,
    #[serde(default)]
    pub df: DfConvention,
    #[serde(default)]
    pub variance: VarianceMethod,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParam(format!("n must be >= 2, got {}", self.n)));
        }
        if self.s == 0 || 4 * self.s > self.p {
            return Err(Error::InvalidLayout(format!(
                "block layout needs 0 < 4s <= p, got s = {}, p = {}",
                self.s, self.p
            )));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::InvalidParam(format!("rho must lie in (-1, 1), got {}", self.rho)));
        }
        for (name, v) in [("sigma0", self.sigma0), ("sigma1", self.sigma1), ("sigma2", self.sigma2)]
        {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha_level));
        }
        if self.n_replications == 0 {
            return Err(Error::InvalidParam("n_replications must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParam("no methods requested".into()));
        }
        Ok(())
    }
}

/// The true coefficient vectors behind one study.
#[derive(Debug, Clone)]
pub struct TruthSet {
    pub beta0: Array1<f64>,
    pub beta1: Array1<f64>,
    pub beta2: Array1<f64>,
    pub omega: Array1<f64>,
    /// L1 distance between the target vector and the span combination, i.e.
    /// the misalignment ||omega||_1 = s * |theta2|.
    pub h_true: f64,
}

/// Exact block layout of the coefficient vectors: the first auxiliary loads
/// on the leading and trailing s coordinates, the second on the 2s after the
/// first block, the misalignment on the s after that, and the target is
/// `beta1 - 0.5 beta2 + omega`.
pub fn generate_truth(config: &SimConfig) -> Result<TruthSet> {
    config.validate()?;
    let p = config.p;
    let s = config.s;
    let mut beta1 = Array1::<f64>::zeros(p);
    let mut beta2 = Array1::<f64>::zeros(p);
    let mut omega = Array1::<f64>::zeros(p);
    for k in 0..s {
        beta1[k] = config.theta1;
        beta1[p - s + k] = config.theta1;
    }
    for k in s..(3 * s) {
        beta2[k] = config.theta1;
    }
    for k in (3 * s)..(4 * s) {
        omega[k] = config.theta2;
    }
    let beta0 = &beta1 - &(0.5 * &beta2) + &omega;
    let h_true = omega.iter().map(|v| v.abs()).sum();
    Ok(TruthSet { beta0, beta1, beta2, omega, h_true })
}

/// Draws one replication: covariates with AR(1) correlation via the exact
/// recursive factorization, then the three outcomes. The stream is
/// `(seed, replication_index)`, so any replication can be regenerated alone.
pub fn generate_dataset(config: &SimConfig, truth: &TruthSet, replication: usize) -> Dataset {
    let n = config.n;
    let p = config.p;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(replication as u64);
    let normal = StandardNormal;

    let innovation = (1.0 - config.rho * config.rho).sqrt();
    let mut x = Array2::<f64>::zeros((n, p));
    for i in 0..n {
        let mut prev: f64 = normal.sample(&mut rng);
        x[(i, 0)] = prev;
        for j in 1..p {
            let z: f64 = normal.sample(&mut rng);
            prev = config.rho * prev + innovation * z;
            x[(i, j)] = prev;
        }
    }

    let mut draw_outcome = |beta: &Array1<f64>, sigma: f64| -> Array1<f64> {
        let mut y = x.dot(beta);
        for i in 0..n {
            let z: f64 = normal.sample(&mut rng);
            y[i] += sigma * z;
        }
        y
    };
    let y0 = draw_outcome(&truth.beta0, config.sigma0);
    let y1 = draw_outcome(&truth.beta1, config.sigma1);
    let y2 = draw_outcome(&truth.beta2, config.sigma2);

    let feature_names = (1..=p).map(|k| format!("x{k}")).collect();
    let outcome_names =
        vec!["target".to_string(), "aux1".to_string(), "aux2".to_string()];
    Dataset { x, y_target: y0, y_aux: vec![y1, y2], feature_names, outcome_names }
}

/// |cosine| of the angle between two coefficient vectors; a truth-side
/// diagnostic of how informative one outcome is for another.
pub fn information_score(beta0: &Array1<f64>, betaj: &Array1<f64>) -> Result<f64> {
    if beta0.len() != betaj.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            beta0.len(),
            betaj.len()
        )));
    }
    let n0 = beta0.dot(beta0).sqrt();
    let nj = betaj.dot(betaj).sqrt();
    if n0 == 0.0 || nj == 0.0 {
        return Err(Error::ZeroVector("information_score"));
    }
    Ok((beta0.dot(betaj) / (n0 * nj)).abs())
}
