//! Within-cohort transfer learning for high-dimensional linear regression.
//!
//! The library estimates a target regression vector by borrowing strength
//! from auxiliary outcomes measured on the same samples: each auxiliary
//! outcome is fit by the lasso, the target is regressed on the fitted
//! auxiliary signals plus a sparse correction, and the pieces are composed
//! into the CoMMiT estimator. On top of the estimator sit a debiasing layer
//! for per-coefficient tests and confidence intervals, a data-driven
//! procedure for choosing the auxiliary set, compositional data transforms,
//! and a reproducible simulation harness comparing the estimator against
//! lasso, ridge, and debiased-lasso baselines.
//!
//! Start with the runnable examples (`cargo run --example <name>`):
//!
//! - `lasso_path` - the weighted-L1 solver, paths, and cross-validation
//! - `fit_commit` - the three-step estimator on synthetic data
//! - `debiased_inference` - p-values, confidence intervals, FDR adjustment
//! - `select_auxiliary` - screening and CV selection of auxiliary outcomes
//! - `simulation_study` - a desk-scale method comparison
//! - `clr_ingestion` - CSV ingestion and compositional transforms
//!
//! The same capabilities are exposed by the `commit-tl` binary
//! (`simulate`, `select-aux`, `fit`, `infer`, `report`).

pub mod error;
mod linalg;

pub mod estimator;
pub mod inference;
pub mod io;
pub mod select;
pub mod sim;
pub mod solver;

pub mod cli;

pub use error::{Error, Result};
