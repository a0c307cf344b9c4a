//! Debiased inference for the composed estimator: nodewise projection
//! directions, bias-corrected coefficients, noise-variance estimation,
//! t-based p-values and confidence intervals, and FDR adjustment.

mod debias;
mod fdr;
mod nodewise;
mod variance;

pub use debias::debias_coefficients;
pub use fdr::bh_adjust;
pub use nodewise::{
    bias_factor_report, nodewise_residuals, NodewiseOptions, NodewiseResiduals, ZetaChoice,
    ZetaPolicy,
};
pub use variance::{
    naive_variance, natural_lasso_variance, support_corrected_variance, NaturalLassoOptions,
    VarianceMethod,
};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::estimator::{CommitFit, Dataset};

/// Degrees of freedom used by the reference distribution of the test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DfConvention {
    N,
    NMinusOne,
    Normal,
}

impl Default for DfConvention {
    fn default() -> Self {
        DfConvention::N
    }
}

impl DfConvention {
    /// Resolved degrees of freedom; `None` means the normal limit.
    pub fn value(self, n: usize) -> Option<f64> {
        match self {
            DfConvention::N => Some(n as f64),
            DfConvention::NMinusOne => Some((n - 1) as f64),
            DfConvention::Normal => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferenceOptions {
    pub variance: VarianceMethod,
    pub alpha_level: f64,
    pub df: DfConvention,
    /// Settings for the dedicated variance lasso (when `variance` is
    /// `Natural`); its `intercept` flag should match the main fit.
    pub natural: NaturalLassoOptions,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            variance: VarianceMethod::Natural,
            alpha_level: 0.05,
            df: DfConvention::N,
            natural: NaturalLassoOptions::default(),
        }
    }
}

/// Per-coefficient debiased estimates with tests, intervals, and diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InferenceResult {
    pub beta0_de: Vec<f64>,
    pub se: Vec<f64>,
    pub p_values: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
    pub p_adjusted: Vec<f64>,
    /// Estimated noise standard deviation.
    pub sigma0_hat: f64,
    pub variance_method: VarianceMethod,
    pub df: DfConvention,
    pub n: usize,
    pub alpha_level: f64,
    pub tau: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_max: f64,
}

/// Which fit feeds the noise-variance estimator.
pub enum SigmaSpec<'a> {
    /// Mean squared residual of a coefficient vector (typically debiased).
    Naive { beta: &'a Array1<f64>, intercept: f64 },
    /// Residual sum of squares over `n - s_hat` for a sparse fit.
    Sf { beta: &'a Array1<f64>, intercept: f64 },
    /// A dedicated penalized fit; see `natural_lasso_variance`.
    Natural(&'a NaturalLassoOptions),
}

/// Dispatches to the selected noise-variance estimator; returns a variance.
pub fn estimate_noise_variance(x: &Array2<f64>, y: &Array1<f64>, spec: SigmaSpec) -> Result<f64> {
    match spec {
        SigmaSpec::Naive { beta, intercept } => Ok(naive_variance(x, y, beta, intercept)),
        SigmaSpec::Sf { beta, intercept } => support_corrected_variance(x, y, beta, intercept),
        SigmaSpec::Natural(opts) => natural_lasso_variance(x, y, opts).map(|(v, _)| v),
    }
}

/// Two-sided p-values and confidence intervals for debiased coordinates at a
/// common noise scale: `se_l = sigma0 / tau_l`, the statistic is referred to
/// a t distribution with the given degrees of freedom (normal when `None`).
pub fn per_coordinate_tests(
    beta_de: &[f64],
    tau: &[f64],
    sigma0: f64,
    df: Option<f64>,
    alpha_level: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    if !(alpha_level > 0.0 && alpha_level < 1.0) {
        return Err(Error::InvalidAlpha(alpha_level));
    }
    if beta_de.len() != tau.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} estimates vs {} scale factors",
            beta_de.len(),
            tau.len()
        )));
    }
    if sigma0 < 0.0 || !sigma0.is_finite() {
        return Err(Error::InvalidParam(format!("sigma0 must be finite and nonnegative, got {sigma0}")));
    }

    enum Ref {
        T(StudentsT),
        Z(Normal),
    }
    let dist = match df {
        Some(v) => Ref::T(
            StudentsT::new(0.0, 1.0, v)
                .map_err(|e| Error::Numerical(format!("t distribution with df {v}: {e}")))?,
        ),
        None => Ref::Z(Normal::new(0.0, 1.0).expect("standard normal")),
    };
    let (cdf, crit): (Box<dyn Fn(f64) -> f64>, f64) = match &dist {
        Ref::T(t) => (Box::new(move |x| t.cdf(x)), t.inverse_cdf(1.0 - alpha_level / 2.0)),
        Ref::Z(z) => (Box::new(move |x| z.cdf(x)), z.inverse_cdf(1.0 - alpha_level / 2.0)),
    };

    let m = beta_de.len();
    let mut se = vec![0.0; m];
    let mut p = vec![0.0; m];
    let mut lo = vec![0.0; m];
    let mut hi = vec![0.0; m];
    for l in 0..m {
        if tau[l] <= 0.0 {
            return Err(Error::DegenerateColumn {
                index: l,
                reason: "nonpositive scale factor".into(),
            });
        }
        se[l] = sigma0 / tau[l];
        if se[l] == 0.0 {
            // noiseless limit: point-mass interval, degenerate test
            p[l] = if beta_de[l] == 0.0 { 1.0 } else { 0.0 };
            lo[l] = beta_de[l];
            hi[l] = beta_de[l];
        } else {
            let stat = beta_de[l] / se[l];
            p[l] = (2.0 * cdf(-stat.abs())).min(1.0);
            lo[l] = beta_de[l] - crit * se[l];
            hi[l] = beta_de[l] + crit * se[l];
        }
    }
    Ok((se, p, lo, hi))
}

/// Debiases a composed fit and derives per-coefficient tests.
///
/// Each retained auxiliary fit is bias-corrected against its own outcome,
/// the correction is bias-corrected against the target residual after
/// removing the weighted auxiliary signals, and the pieces are recomposed
/// with the same weights. The nodewise residuals are computed once by the
/// caller and shared across all passes.
pub fn debias_commit(
    fit: &CommitFit,
    dataset: &Dataset,
    z: &NodewiseResiduals,
    opts: &InferenceOptions,
) -> Result<InferenceResult> {
    if !(opts.alpha_level > 0.0 && opts.alpha_level < 1.0) {
        return Err(Error::InvalidAlpha(opts.alpha_level));
    }
    let x = &dataset.x;
    let n = dataset.n();
    let p = dataset.p();
    if z.p() != p || z.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "nodewise residuals are {}x{} but the dataset is {n}x{p}",
            z.n(),
            z.p()
        )));
    }

    // bias-corrected auxiliary coefficients
    let mut beta0_de = Array1::<f64>::zeros(p);
    let mut weighted_signals = Array1::<f64>::zeros(n);
    for (pos, &j) in fit.retained_aux.iter().enumerate() {
        let response = dataset.y_aux[j].mapv(|v| v) - fit.aux_intercepts[pos];
        let de = debias_coefficients(&fit.aux_coefficients[pos], x, &response, z)?;
        beta0_de.scaled_add(fit.alpha[pos], &de);
        weighted_signals.scaled_add(fit.alpha[pos], &x.dot(&fit.aux_coefficients[pos]));
    }

    // bias-corrected correction against the target residual
    let response_w = &dataset.y_target - &weighted_signals - fit.intercept;
    let w_de = debias_coefficients(&fit.correction, x, &response_w, z)?;
    beta0_de += &w_de;

    let sigma_sq = match opts.variance {
        VarianceMethod::Naive => {
            naive_variance(x, &dataset.y_target, &beta0_de, fit.intercept)
        }
        VarianceMethod::Sf => {
            support_corrected_variance(x, &dataset.y_target, &fit.coefficients, fit.intercept)?
        }
        VarianceMethod::Natural => {
            natural_lasso_variance(x, &dataset.y_target, &opts.natural)?.0
        }
    };
    let sigma0_hat = sigma_sq.sqrt();

    let tau: Vec<f64> = z.tau.to_vec();
    let beta_vec: Vec<f64> = beta0_de.to_vec();
    let (se, p_values, ci_lower, ci_upper) =
        per_coordinate_tests(&beta_vec, &tau, sigma0_hat, opts.df.value(n), opts.alpha_level)?;
    let p_adjusted = bh_adjust(&p_values)?;

    Ok(InferenceResult {
        beta0_de: beta_vec,
        se,
        p_values,
        ci_lower,
        ci_upper,
        p_adjusted,
        sigma0_hat,
        variance_method: opts.variance,
        df: opts.df,
        n,
        alpha_level: opts.alpha_level,
        tau,
        eta: z.eta.to_vec(),
        eta_max: z.eta_max(),
    })
}
