//! Data-driven selection of the auxiliary outcome set.
//!
//! Candidates are screened by "microbial correlation": the correlation
//! between the target's feature-correlation profile and each candidate's
//! profile. Survivors are ordered by strength and nested prefixes are
//! compared by cross-validated prediction error of the full estimator; the
//! best prefix wins, with ties going to the smaller set.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::estimator::{fit_commit, predict, CommitConfig, Dataset};
use crate::solver::fold_assignment;

/// Feature-correlation profiles and the derived screening statistics.
#[derive(Debug, Clone)]
pub struct MicrobialCorrelation {
    /// Signed profile correlations, one per candidate.
    pub rho_hat: Vec<f64>,
    /// their absolute values
    pub r_hat: Vec<f64>,
    /// Two-sided p-values of the profile correlations (t test, p - 2 df).
    pub p_hat: Vec<f64>,
    /// (q + 1) x p outcome-feature correlations; row 0 is the target.
    pub r_matrix: Array2<f64>,
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let am = a.iter().sum::<f64>() / n;
    let bm = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        let u = a[i] - am;
        let v = b[i] - bm;
        num += u * v;
        va += u * u;
        vb += v * v;
    }
    if va == 0.0 || vb == 0.0 {
        None
    } else {
        Some((num / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0))
    }
}

/// Correlation between each outcome's feature-correlation profile and the
/// target's. Constant covariate columns contribute a zero correlation to
/// every profile; constant outcomes or constant profiles are errors.
pub fn microbial_correlation(
    x: &Array2<f64>,
    y_target: &Array1<f64>,
    y_candidates: &[Array1<f64>],
) -> Result<MicrobialCorrelation> {
    let n = x.nrows();
    let p = x.ncols();
    let q = y_candidates.len();
    if q == 0 {
        return Err(Error::InvalidParam("no candidate outcomes".into()));
    }
    if p < 3 {
        return Err(Error::InvalidParam(format!(
            "profile correlation test needs p >= 3 features, got {p}"
        )));
    }
    if y_target.len() != n || y_candidates.iter().any(|y| y.len() != n) {
        return Err(Error::DimensionMismatch("outcome length vs covariate rows".into()));
    }

    let mut r_matrix = Array2::<f64>::zeros((q + 1, p));
    let col_buf: Vec<Vec<f64>> = (0..p).map(|k| x.column(k).to_vec()).collect();
    for (row, y) in std::iter::once(y_target).chain(y_candidates.iter()).enumerate() {
        let ys = y.as_slice().map(|s| s.to_vec()).unwrap_or_else(|| y.to_vec());
        let ym = ys.iter().sum::<f64>() / n as f64;
        if ys.iter().all(|v| *v == ym) {
            let name = if row == 0 { "target outcome".into() } else { format!("candidate {}", row - 1) };
            return Err(Error::ZeroVariance(name));
        }
        for k in 0..p {
            r_matrix[(row, k)] = pearson(&ys, &col_buf[k]).unwrap_or(0.0);
        }
    }

    let target_profile: Vec<f64> = (0..p).map(|k| r_matrix[(0, k)]).collect();
    let df = (p - 2) as f64;
    let t_dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Numerical(format!("t distribution with df {df}: {e}")))?;

    let mut rho_hat = Vec::with_capacity(q);
    let mut r_hat = Vec::with_capacity(q);
    let mut p_hat = Vec::with_capacity(q);
    for j in 0..q {
        let profile: Vec<f64> = (0..p).map(|k| r_matrix[(j + 1, k)]).collect();
        let rho = pearson(&target_profile, &profile).ok_or_else(|| {
            Error::ZeroVariance(format!("correlation profile of candidate {j}"))
        })?;
        let p_val = if rho.abs() >= 1.0 {
            0.0
        } else {
            let t = rho * (df / (1.0 - rho * rho)).sqrt();
            (2.0 * t_dist.cdf(-t.abs())).min(1.0)
        };
        rho_hat.push(rho);
        r_hat.push(rho.abs());
        p_hat.push(p_val);
    }
    Ok(MicrobialCorrelation { rho_hat, r_hat, p_hat, r_matrix })
}

/// Indices passing both screening thresholds, sorted by `r_hat`
/// non-increasing; ties keep candidate input order (stable sort).
pub fn screen(mc: &MicrobialCorrelation, r0: f64, p0: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = (0..mc.r_hat.len())
        .filter(|&j| mc.r_hat[j] > r0 && mc.p_hat[j] < p0)
        .collect();
    kept.sort_by(|&a, &b| mc.r_hat[b].partial_cmp(&mc.r_hat[a]).unwrap());
    kept
}

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    /// Screening threshold on |profile correlation|.
    pub r0: f64,
    /// Screening threshold on its p-value.
    pub p0: f64,
    pub k_folds: usize,
    pub seed: u64,
    /// Configuration of the estimator refit inside each fold (penalty levels
    /// are re-tuned per fold to avoid selection leakage).
    pub commit: CommitConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { r0: 0.5, p0: 0.05, k_folds: 5, seed: 0, commit: CommitConfig::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    /// Candidate indices surviving the screen, strongest first.
    pub screened: Vec<usize>,
    /// CV prediction error of each nested prefix (infinite if a fold failed).
    pub mse_by_m: Vec<f64>,
    /// Size of the winning prefix (0 when the screen is empty).
    pub m_opt: usize,
    /// `screened[0..m_opt]`.
    pub selected: Vec<usize>,
    pub thresholds: (f64, f64),
    pub folds: usize,
    pub warnings: Vec<String>,
}

/// Screens the candidate pool and picks the prefix length minimizing k-fold
/// cross-validated prediction error of the full estimator. The dataset's
/// auxiliary outcomes are the candidate pool. Deterministic in (inputs, seed).
pub fn select_auxiliary(pool: &Dataset, config: &SelectionConfig) -> Result<SelectionResult> {
    if !(0.0..1.0).contains(&config.r0) {
        return Err(Error::InvalidParam(format!("r0 must lie in [0, 1), got {}", config.r0)));
    }
    if !(config.p0 > 0.0 && config.p0 <= 1.0) {
        return Err(Error::InvalidParam(format!("p0 must lie in (0, 1], got {}", config.p0)));
    }
    if config.k_folds < 2 {
        return Err(Error::InvalidParam(format!("k_folds must be >= 2, got {}", config.k_folds)));
    }

    let mc = microbial_correlation(&pool.x, &pool.y_target, &pool.y_aux)?;
    let screened = screen(&mc, config.r0, config.p0);
    if screened.is_empty() {
        return Ok(SelectionResult {
            screened,
            mse_by_m: Vec::new(),
            m_opt: 0,
            selected: Vec::new(),
            thresholds: (config.r0, config.p0),
            folds: config.k_folds,
            warnings: Vec::new(),
        });
    }

    let n = pool.n();
    let q0 = screened.len();
    let k = config.k_folds;
    if k > n {
        return Err(Error::TooFewSamples(format!("cannot split {n} observations into {k} folds")));
    }
    let folds = fold_assignment(n, k, config.seed);

    let tasks: Vec<(usize, usize)> =
        (1..=q0).flat_map(|m| (0..k).map(move |f| (m, f))).collect();
    let outcomes: Vec<(usize, usize, std::result::Result<f64, String>)> = tasks
        .par_iter()
        .map(|&(m, f)| {
            let subset = pool.with_aux_subset(&screened[0..m]);
            let train: Vec<usize> = (0..n).filter(|i| folds[*i] != f).collect();
            let valid: Vec<usize> = (0..n).filter(|i| folds[*i] == f).collect();
            let train_data = subset.select_rows(&train);
            let result = fit_commit(&train_data, &config.commit).and_then(|fit| {
                let x_valid = subset.x.select(ndarray::Axis(0), &valid);
                let pred = predict(&fit, &x_valid)?;
                Ok(valid
                    .iter()
                    .zip(pred.iter())
                    .map(|(&i, &yh)| (subset.y_target[i] - yh) * (subset.y_target[i] - yh))
                    .sum::<f64>())
            });
            (m, f, result.map_err(|e| e.to_string()))
        })
        .collect();

    let mut sse = vec![0.0f64; q0 + 1];
    let mut failed = vec![false; q0 + 1];
    let mut warnings = Vec::new();
    for (m, f, outcome) in outcomes {
        match outcome {
            Ok(v) => sse[m] += v,
            Err(msg) => {
                failed[m] = true;
                warnings.push(format!("prefix {m}, fold {f}: {msg}"));
            }
        }
    }
    let mse_by_m: Vec<f64> = (1..=q0)
        .map(|m| if failed[m] { f64::INFINITY } else { sse[m] / n as f64 })
        .collect();

    let mut m_opt = 1usize;
    for m in 2..=q0 {
        if mse_by_m[m - 1] < mse_by_m[m_opt - 1] {
            m_opt = m;
        }
    }
    let selected = screened[0..m_opt].to_vec();
    Ok(SelectionResult {
        screened,
        mse_by_m,
        m_opt,
        selected,
        thresholds: (config.r0, config.p0),
        folds: k,
        warnings,
    })
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

    fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
        Array1::from_shape_fn(n, |_| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
    }

    #[test]
    fn identical_candidate_has_unit_correlation() {
        let x = gaussian(1, 40, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = x.column(0).to_owned() + gaussian_vec(&mut rng, 40) * 0.2;
        let mc = microbial_correlation(&x, &y, &[y.clone()]).unwrap();
        assert!((mc.rho_hat[0] - 1.0).abs() < 1e-12);
        assert!(mc.p_hat[0] < 1e-10);
    }

    #[test]
    fn negated_candidate_flips_sign_but_not_strength() {
        let x = gaussian(3, 40, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y = x.column(1).to_owned() + gaussian_vec(&mut rng, 40) * 0.2;
        let mc = microbial_correlation(&x, &y, &[-&y]).unwrap();
        assert!((mc.rho_hat[0] + 1.0).abs() < 1e-12);
        assert!((mc.r_hat[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_noise_candidate_scores_low_at_many_features() {
        // median |profile correlation| across seeds stays small at p = 134
        let mut scores = Vec::new();
        for seed in 0..15 {
            let x = gaussian(100 + seed, 73, 134);
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let y = x.column(0).to_owned() + gaussian_vec(&mut rng, 73) * 0.5;
            let noise = gaussian_vec(&mut rng, 73);
            let mc = microbial_correlation(&x, &y, &[noise]).unwrap();
            scores.push(mc.r_hat[0]);
        }
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = scores[scores.len() / 2];
        assert!(median < 0.3, "median noise correlation {median}");
    }

    #[test]
    fn constant_outcome_is_zero_variance() {
        let x = gaussian(5, 20, 5);
        let y = x.column(0).to_owned();
        let constant = Array1::from_elem(20, 3.5);
        let err = microbial_correlation(&x, &y, &[constant]).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance(_)));
    }

    #[test]
    fn screening_is_monotone_in_both_thresholds() {
        let x = gaussian(7, 50, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y = x.column(0).to_owned() + gaussian_vec(&mut rng, 50) * 0.3;
        let candidates: Vec<Array1<f64>> = (0..6)
            .map(|j| {
                let w = j as f64 / 6.0;
                y.clone() * (1.0 - w) + gaussian_vec(&mut rng, 50) * (0.2 + w)
            })
            .collect();
        let mc = microbial_correlation(&x, &y, &candidates).unwrap();
        let loose: std::collections::HashSet<usize> =
            screen(&mc, 0.3, 0.2).into_iter().collect();
        let tighter_r: std::collections::HashSet<usize> =
            screen(&mc, 0.6, 0.2).into_iter().collect();
        let tighter_p: std::collections::HashSet<usize> =
            screen(&mc, 0.3, 0.01).into_iter().collect();
        assert!(tighter_r.is_subset(&loose));
        assert!(tighter_p.is_subset(&loose));
    }

    #[test]
    fn ties_keep_candidate_input_order() {
        let x = gaussian(9, 30, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let y = x.column(0).to_owned() + gaussian_vec(&mut rng, 30) * 0.2;
        // two byte-identical candidates: equal r_hat, input order must hold
        let c = y.clone() * 0.9 + gaussian_vec(&mut rng, 30) * 0.05;
        let mc = microbial_correlation(&x, &y, &[c.clone(), c]).unwrap();
        assert_eq!(mc.r_hat[0], mc.r_hat[1]);
        let order = screen(&mc, 0.2, 0.5);
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn copy_beats_noise_and_prefix_structure_holds() {
        let n = 60;
        let p = 16;
        let x = gaussian(11, n, p);
        let beta = Array1::from_shape_fn(p, |k| if k < 4 { 0.8 } else { 0.0 });
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let y0 = x.dot(&beta) + gaussian_vec(&mut rng, n) * 0.3;
        let copy = y0.clone();
        let noise1 = gaussian_vec(&mut rng, n);
        let noise2 = gaussian_vec(&mut rng, n);
        let pool = Dataset::unnamed(x, y0, vec![noise1, copy, noise2]).unwrap();
        let config = SelectionConfig { seed: 3, ..Default::default() };
        let result = select_auxiliary(&pool, &config).unwrap();
        assert_eq!(result.m_opt, 1);
        assert_eq!(result.selected, vec![1], "the exact copy must win");
        assert_eq!(result.screened[0..result.m_opt], result.selected[..]);
        assert_eq!(result.mse_by_m.len(), result.screened.len());

        // determinism
        let again = select_auxiliary(&pool, &config).unwrap();
        assert_eq!(result.mse_by_m, again.mse_by_m);
        assert_eq!(result.selected, again.selected);
    }

    #[test]
    fn empty_screen_returns_m_opt_zero() {
        let x = gaussian(13, 40, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let y = x.column(0).to_owned() + gaussian_vec(&mut rng, 40) * 0.3;
        let noise = gaussian_vec(&mut rng, 40);
        let pool = Dataset::unnamed(x, y, vec![noise]).unwrap();
        let config = SelectionConfig { r0: 0.99, p0: 1e-12, ..Default::default() };
        let result = select_auxiliary(&pool, &config).unwrap();
        assert_eq!(result.m_opt, 0);
        assert!(result.selected.is_empty());
        assert!(result.mse_by_m.is_empty());
    }

    #[test]
    fn default_thresholds_match_convention() {
        let config = SelectionConfig::default();
        assert_eq!(config.r0, 0.5);
        assert_eq!(config.p0, 0.05);
        assert_eq!(config.k_folds, 5);
    }
}
