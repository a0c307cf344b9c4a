//! The `commit-tl` command-line surface: thin orchestration over the library.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! Failures print one line of machine-readable JSON to stderr.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::estimator::{fit_commit, CommitConfig, CommitFit, Dataset, LambdaPolicy};
use crate::inference::{
    debias_commit, nodewise_residuals, InferenceOptions, NaturalLassoOptions, NodewiseOptions,
};
use crate::io::config::{Candidates, RunConfig, SolverParams};
use crate::io::output::{
    to_json_bytes, DroppedAuxNamed, FitDocument, InferenceDocument, Meta, SelectionDocument,
    SimulationDocument,
};
use crate::io::{clr_transform, load_csv, load_json_config, log_transform};
use crate::select::{select_auxiliary, SelectionConfig};
use crate::sim::{run_study, SimConfig};
use crate::solver::PathOptions;

#[derive(Parser)]
#[command(
    name = "commit-tl",
    version,
    about = "Within-cohort transfer learning for high-dimensional linear regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run a simulation study and write report JSON + per-replication CSV
    Simulate {
        /// Simulation config JSON
        #[arg(long)]
        config: PathBuf,
        /// Override a config field: key.path=value (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (default ".")
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Screen candidate outcomes and pick the best auxiliary set by CV
    SelectAux {
        /// Analysis config JSON
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the estimator with the configured auxiliaries
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit, debias, and test every coefficient
    Infer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a readable summary of any result JSON
    Report {
        /// A result file written by simulate, select-aux, fit, or infer
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{e}");
            emit_error_json("usage", &e.to_string(), 1);
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            emit_error_json(e.kind(), &e.to_string(), code);
            code
        }
    }
}

fn emit_error_json(kind: &str, message: &str, exit_code: i32) {
    let doc = serde_json::json!({
        "error": { "kind": kind, "message": message, "exit_code": exit_code }
    });
    eprintln!("{doc}");
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, set, out } => cmd_simulate(&config, &set, out.as_deref()),
        Command::SelectAux { config, set, out } => cmd_select_aux(&config, &set, out.as_deref()),
        Command::Fit { config, set, out } => cmd_fit(&config, &set, out.as_deref()),
        Command::Infer { config, set, out } => cmd_infer(&config, &set, out.as_deref()),
        Command::Report { input } => {
            print!("{}", crate::io::output::render_report(&input)?);
            Ok(())
        }
    }
}

fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, bytes)?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

fn cmd_simulate(config_path: &Path, overrides: &[String], out: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let config: SimConfig = load_json_config(config_path, overrides)?;
    let output = run_study(&config)?;
    let doc = SimulationDocument {
        kind: "simulation".into(),
        report: output.report,
        meta: Meta {
            runtime_ms: Some(start.elapsed().as_secs_f64() * 1e3),
            dropped_rows: None,
            notes: Some(serde_json::to_value(&output.runtime)?),
        },
    };
    let dir = out.unwrap_or(Path::new("."));
    write_output(dir, "simulation_report.json", &to_json_bytes(&doc)?)?;
    write_output(dir, "simulation_records.csv", doc.to_csv().as_bytes())?;
    Ok(())
}

/// Data loaded, aligned, filtered, and transformed per the config.
struct AnalysisInputs {
    x: Array2<f64>,
    feature_names: Vec<String>,
    outcomes: Array2<f64>,
    outcome_names: Vec<String>,
    /// Index of the target within `outcome_names`.
    target: usize,
    /// Candidate indices within `outcome_names`, in configured order.
    candidates: Vec<usize>,
    dropped_rows: usize,
}

fn prepare(config: &RunConfig) -> Result<AnalysisInputs> {
    config.validate()?;
    let microbes = load_csv(Path::new(&config.microbe_csv), config.orientation)?;
    let metabolites = load_csv(Path::new(&config.metabolite_csv), config.orientation)?;

    // align metabolite rows to the microbe sample order by exact id
    let mut order = Vec::with_capacity(microbes.n_samples());
    for id in &microbes.sample_ids {
        match metabolites.sample_ids.iter().position(|m| m == id) {
            Some(pos) => order.push(pos),
            None => {
                return Err(Error::Config(format!(
                    "sample {id:?} is missing from the metabolite table"
                )))
            }
        }
    }
    let met_values = metabolites.values.select(Axis(0), &order);

    // resolve outcome names (exact, case-sensitive)
    let target = metabolites
        .column_index(&config.target)
        .ok_or_else(|| Error::UnknownOutcome(config.target.clone()))?;
    let candidates: Vec<usize> = match &config.candidates {
        Candidates::All(_) => {
            (0..metabolites.n_columns()).filter(|&j| j != target).collect()
        }
        Candidates::Named(names) => {
            let mut idx = Vec::with_capacity(names.len());
            for name in names {
                let j = metabolites
                    .column_index(name)
                    .ok_or_else(|| Error::UnknownOutcome(name.clone()))?;
                if j == target {
                    return Err(Error::Config(format!(
                        "candidate {name:?} is the target outcome"
                    )));
                }
                idx.push(j);
            }
            idx
        }
    };

    // complete cases over the used columns only
    let used: Vec<usize> = std::iter::once(target).chain(candidates.iter().copied()).collect();
    let keep: Vec<usize> = (0..microbes.n_samples())
        .filter(|&i| {
            microbes.values.row(i).iter().all(|v| !v.is_nan())
                && used.iter().all(|&j| !met_values[(i, j)].is_nan())
        })
        .collect();
    let dropped_rows = microbes.n_samples() - keep.len();
    if dropped_rows > 0 {
        eprintln!("dropped {dropped_rows} incomplete rows");
    }
    if keep.len() < 3 {
        return Err(Error::TooFewSamples(format!(
            "{} complete rows after filtering",
            keep.len()
        )));
    }
    let microbe_values = microbes.values.select(Axis(0), &keep);
    let met_values = met_values.select(Axis(0), &keep);

    let x = if config.transform.clr {
        clr_transform(&microbe_values, config.transform.pseudocount)?
    } else {
        microbe_values
    };
    let used_outcomes = met_values.select(Axis(1), &used);
    let outcomes = if config.transform.log {
        log_transform(&used_outcomes, config.transform.offset)?
    } else {
        used_outcomes
    };
    let outcome_names: Vec<String> =
        used.iter().map(|&j| metabolites.column_names[j].clone()).collect();

    Ok(AnalysisInputs {
        x,
        feature_names: microbes.column_names,
        outcomes,
        outcome_names,
        target: 0,
        candidates: (1..used.len()).collect(),
        dropped_rows,
    })
}

fn commit_config(solver: &SolverParams) -> CommitConfig {
    let policy = LambdaPolicy::CrossValidated { k: solver.cv_folds, rule: solver.lambda_rule };
    CommitConfig {
        aux_lambda: policy.clone(),
        w_lambda: policy,
        intercept: solver.intercept,
        seed: solver.seed,
        path: PathOptions {
            n_lambda: solver.n_lambda,
            lambda_min_ratio: solver.lambda_min_ratio,
            lambdas: None,
        },
        solver: crate::solver::SolverOptions {
            tol: solver.tol,
            max_sweeps: solver.max_sweeps,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn build_dataset(inputs: &AnalysisInputs, aux: &[usize]) -> Result<Dataset> {
    Dataset::new(
        inputs.x.clone(),
        inputs.outcomes.column(inputs.target).to_owned(),
        aux.iter().map(|&j| inputs.outcomes.column(j).to_owned()).collect(),
        inputs.feature_names.clone(),
        std::iter::once(inputs.outcome_names[inputs.target].clone())
            .chain(aux.iter().map(|&j| inputs.outcome_names[j].clone()))
            .collect(),
    )
}

fn fit_document(
    config: &RunConfig,
    inputs: &AnalysisInputs,
    dataset: &Dataset,
    fit: &CommitFit,
    runtime_ms: f64,
) -> FitDocument {
    let aux_names: Vec<String> =
        fit.retained_aux.iter().map(|&j| dataset.outcome_names[j + 1].clone()).collect();
    let dropped = fit
        .dropped_aux
        .iter()
        .map(|d| DroppedAuxNamed {
            name: dataset.outcome_names[d.index + 1].clone(),
            dropped: d.clone(),
        })
        .collect();
    FitDocument {
        kind: "fit".into(),
        target: config.target.clone(),
        auxiliaries: aux_names,
        alpha: fit.alpha.to_vec(),
        aux_lambdas: fit.aux_lambdas.clone(),
        correction_lambda: fit.correction_lambda,
        dropped,
        no_auxiliaries: dataset.n_aux() == 0,
        intercept: fit.intercept,
        features: dataset.feature_names.clone(),
        coefficients: fit.coefficients.to_vec(),
        correction: fit.correction.to_vec(),
        meta: Meta {
            runtime_ms: Some(runtime_ms),
            dropped_rows: Some(inputs.dropped_rows),
            notes: None,
        },
    }
}

fn cmd_fit(config_path: &Path, overrides: &[String], out: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let config: RunConfig = load_json_config(config_path, overrides)?;
    let inputs = prepare(&config)?;
    let dataset = build_dataset(&inputs, &inputs.candidates)?;
    let fit = fit_commit(&dataset, &commit_config(&config.solver))?;
    let doc = fit_document(
        &config,
        &inputs,
        &dataset,
        &fit,
        start.elapsed().as_secs_f64() * 1e3,
    );
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&config.output_dir));
    write_output(&dir, "fit.json", &to_json_bytes(&doc)?)?;
    Ok(())
}

fn cmd_infer(config_path: &Path, overrides: &[String], out: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let config: RunConfig = load_json_config(config_path, overrides)?;
    let inputs = prepare(&config)?;
    let dataset = build_dataset(&inputs, &inputs.candidates)?;
    let commit_cfg = commit_config(&config.solver);
    let fit = fit_commit(&dataset, &commit_cfg)?;

    let nodewise_opts = NodewiseOptions {
        zeta: config.inference.zeta.to_policy(config.inference.seed),
        path: commit_cfg.path.clone(),
        solver: crate::solver::SolverOptions {
            intercept: false,
            tol: config.solver.tol,
            max_sweeps: config.solver.max_sweeps,
            ..Default::default()
        },
        ..Default::default()
    };
    let z = nodewise_residuals(&dataset.x, &nodewise_opts)?;
    let inference_opts = InferenceOptions {
        variance: config.inference.variance,
        alpha_level: config.inference.alpha,
        df: config.inference.df,
        natural: NaturalLassoOptions {
            lambda: LambdaPolicy::CrossValidated {
                k: config.solver.cv_folds,
                rule: config.solver.lambda_rule,
            },
            intercept: config.solver.intercept,
            seed: config.inference.seed,
            path: commit_cfg.path.clone(),
            solver: Default::default(),
        },
    };
    let result = debias_commit(&fit, &dataset, &z, &inference_opts)?;

    let aux_names: Vec<String> =
        fit.retained_aux.iter().map(|&j| dataset.outcome_names[j + 1].clone()).collect();
    let doc = InferenceDocument {
        kind: "inference".into(),
        target: config.target.clone(),
        auxiliaries: aux_names,
        n: dataset.n(),
        alpha_level: result.alpha_level,
        df: result.df,
        variance_method: result.variance_method,
        sigma0_hat: result.sigma0_hat,
        eta_max: result.eta_max,
        features: dataset.feature_names.clone(),
        coefficient: fit.coefficients.to_vec(),
        debiased: result.beta0_de.clone(),
        se: result.se.clone(),
        p_value: result.p_values.clone(),
        p_adjusted: result.p_adjusted.clone(),
        ci_lower: result.ci_lower.clone(),
        ci_upper: result.ci_upper.clone(),
        meta: Meta {
            runtime_ms: Some(start.elapsed().as_secs_f64() * 1e3),
            dropped_rows: Some(inputs.dropped_rows),
            notes: None,
        },
    };
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&config.output_dir));
    write_output(&dir, "infer.json", &to_json_bytes(&doc)?)?;
    write_output(&dir, "infer.csv", doc.to_csv().as_bytes())?;
    Ok(())
}

fn cmd_select_aux(config_path: &Path, overrides: &[String], out: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let config: RunConfig = load_json_config(config_path, overrides)?;
    let inputs = prepare(&config)?;
    let pool = build_dataset(&inputs, &inputs.candidates)?;
    if pool.n_aux() == 0 {
        return Err(Error::Config("no candidate outcomes to select from".into()));
    }
    let selection_cfg = SelectionConfig {
        r0: config.selection.r0,
        p0: config.selection.p0,
        k_folds: config.selection.k_folds,
        seed: config.selection.seed,
        commit: commit_config(&config.solver),
    };
    let result = select_auxiliary(&pool, &selection_cfg)?;

    let candidate_names: Vec<String> = pool.outcome_names[1..].to_vec();
    let mc = crate::select::microbial_correlation(
        &pool.x,
        &pool.y_target,
        &pool.y_aux,
    )?;
    let doc = SelectionDocument {
        kind: "selection".into(),
        target: config.target.clone(),
        candidates: candidate_names.clone(),
        r_hat: mc.r_hat,
        p_hat: mc.p_hat,
        r0: result.thresholds.0,
        p0: result.thresholds.1,
        folds: result.folds,
        screened: result.screened.iter().map(|&j| candidate_names[j].clone()).collect(),
        mse_by_m: result.mse_by_m,
        m_opt: result.m_opt,
        selected: result.selected.iter().map(|&j| candidate_names[j].clone()).collect(),
        warnings: result.warnings,
        meta: Meta {
            runtime_ms: Some(start.elapsed().as_secs_f64() * 1e3),
            dropped_rows: Some(inputs.dropped_rows),
            notes: None,
        },
    };
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&config.output_dir));
    write_output(&dir, "selection.json", &to_json_bytes(&doc)?)?;
    Ok(())
}

/// Builds a `Dataset` directly from in-memory arrays (used by examples).
pub fn dataset_from_arrays(
    x: Array2<f64>,
    y_target: Array1<f64>,
    y_aux: Vec<Array1<f64>>,
) -> Result<Dataset> {
    Dataset::unnamed(x, y_target, y_aux)
}
