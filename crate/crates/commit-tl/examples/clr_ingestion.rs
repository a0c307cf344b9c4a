//! CSV ingestion and the compositional transforms: write a microbe count
//! table and a metabolite table, load them back, CLR- and log-transform, and
//! fit the estimator on the result.
//!
//! ```bash
//! cargo run --example clr_ingestion
//! ```

use commit_tl::estimator::{fit_commit, CommitConfig, Dataset};
use commit_tl::io::{clr_transform, load_csv, log_transform, save_csv, DataTable, Orientation};
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> commit_tl::Result<()> {
    let dir = std::env::temp_dir().join("commit_tl_clr_example");
    std::fs::create_dir_all(&dir)?;

    // fabricate a small count table (40 samples x 25 genera) and two
    // metabolites driven by the first genera
    let n = 40;
    let p = 25;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let counts = Array2::from_shape_fn((n, p), |_| (rng.random::<f64>() * 200.0).floor());
    let microbe_table = DataTable {
        values: counts.clone(),
        sample_ids: (1..=n).map(|i| format!("s{i}")).collect(),
        column_names: (1..=p).map(|j| format!("genus_{j}")).collect(),
    };
    let microbe_path = dir.join("microbes.csv");
    save_csv(&microbe_table, &microbe_path, Orientation::SamplesAsRows)?;

    // outcomes on the abundance scale (positive), log-linear in CLR space
    let clr = clr_transform(&counts, 0.5)?;
    let signal = clr.column(0).to_owned() + clr.column(1).to_owned();
    let target_abundance = signal.mapv(|v| (0.8 * v).exp() * 10.0);
    let aux_abundance = signal.mapv(|v| (0.7 * v).exp() * 5.0);
    let metabolite_table = DataTable {
        values: ndarray::stack![
            ndarray::Axis(1),
            target_abundance.view(),
            aux_abundance.view()
        ],
        sample_ids: microbe_table.sample_ids.clone(),
        column_names: vec!["target_acid".into(), "related_acid".into()],
    };
    let metabolite_path = dir.join("metabolites.csv");
    save_csv(&metabolite_table, &metabolite_path, Orientation::SamplesAsRows)?;
    println!("wrote {} and {}", microbe_path.display(), metabolite_path.display());

    // load back and transform
    let microbes = load_csv(&microbe_path, Orientation::SamplesAsRows)?;
    let metabolites = load_csv(&metabolite_path, Orientation::SamplesAsRows)?;
    assert_eq!(microbes.values, counts, "CSV round-trip is exact");

    let x = clr_transform(&microbes.values, 0.5)?;
    let row_sum: f64 = x.row(0).sum();
    println!("CLR rows sum to zero (first row: {row_sum:.2e})");
    let outcomes = log_transform(&metabolites.values, 0.0)?;

    let dataset = Dataset::new(
        x,
        outcomes.column(0).to_owned(),
        vec![outcomes.column(1).to_owned()],
        microbes.column_names.clone(),
        metabolites.column_names.clone(),
    )?;
    let fit = fit_commit(&dataset, &CommitConfig::default())?;
    println!(
        "fit: weight on {} = {:.3}, {} correction coefficients nonzero",
        dataset.outcome_names[1],
        fit.alpha[0],
        fit.correction.iter().filter(|v| **v != 0.0).count()
    );
    let top = (0..dataset.p())
        .max_by(|&a, &b| {
            fit.coefficients[a].abs().partial_cmp(&fit.coefficients[b].abs()).unwrap()
        })
        .unwrap();
    println!(
        "largest coefficient: {} = {:+.3}",
        dataset.feature_names[top], fit.coefficients[top]
    );
    Ok(())
}
