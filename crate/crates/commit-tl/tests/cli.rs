//! End-to-end behavior of the command-line surface: outputs, round trips,
//! and the exit-code contract.

use std::path::Path;
use std::process::Command;

use commit_tl::io::output::InferenceDocument;

fn bin(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_commit-tl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_tables(dir: &Path, with_missing: bool) {
    let mut microbe = String::from("sample,g1,g2,g3,g4,g5,g6,g7,g8\n");
    let mut metab = String::from("sample,acid_a,acid_b,acid_c\n");
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut unit = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..40 {
        let row: Vec<f64> = (0..8).map(|_| (unit() * 120.0).floor()).collect();
        microbe.push_str(&format!(
            "s{i},{}\n",
            row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        ));
        let signal = (row[0] + 1.0).ln() - (row[1] + 1.0).ln();
        let a = (0.6 * signal).exp() * (3.0 + unit());
        let b = (0.5 * signal).exp() * (2.0 + unit());
        let c = 1.5 + unit();
        if with_missing && i == 3 {
            metab.push_str(&format!("s{i},NA,{b},{c}\n"));
        } else {
            metab.push_str(&format!("s{i},{a},{b},{c}\n"));
        }
    }
    std::fs::write(dir.join("microbes.csv"), microbe).unwrap();
    std::fs::write(dir.join("metabolites.csv"), metab).unwrap();
}

fn write_config(dir: &Path, extra: serde_json::Value) {
    let mut config = serde_json::json!({
        "microbe_csv": "microbes.csv",
        "metabolite_csv": "metabolites.csv",
        "target": "acid_a",
        "candidates": ["acid_b", "acid_c"],
        "solver": { "n_lambda": 30, "cv_folds": 3, "seed": 2 },
        "inference": { "zeta": { "policy": "plugin", "scale": 1.0 }, "seed": 2 }
    });
    if let (Some(base), Some(patch)) = (config.as_object_mut(), extra.as_object()) {
        for (k, v) in patch {
            base.insert(k.clone(), v.clone());
        }
    }
    std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(&config).unwrap())
        .unwrap();
}

#[test]
fn fit_without_candidates_is_flagged_as_plain_lasso() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), false);
    write_config(dir.path(), serde_json::json!({ "candidates": [] }));
    let out = bin(&["fit", "--config", "config.json", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(doc["no_auxiliaries"], serde_json::json!(true));
    assert_eq!(doc["auxiliaries"].as_array().unwrap().len(), 0);
    assert_eq!(doc["kind"], "fit");
}

#[test]
fn infer_output_reloads_losslessly_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), false);
    write_config(dir.path(), serde_json::json!({}));
    let out = bin(&["infer", "--config", "config.json", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // lossless round trip through the typed document
    let bytes = std::fs::read(dir.path().join("infer.json")).unwrap();
    let doc: InferenceDocument = serde_json::from_slice(&bytes).unwrap();
    let mut again = serde_json::to_vec_pretty(&doc).unwrap();
    again.push(b'\n');
    assert_eq!(bytes, again, "deserialize-then-serialize must reproduce the file");

    // the volcano-plot CSV has the promised columns
    let csv = std::fs::read_to_string(dir.path().join("infer.csv")).unwrap();
    assert!(csv.starts_with(
        "feature,coefficient,debiased_estimate,se,p_value,p_adjusted,ci_lower,ci_upper\n"
    ));
    assert_eq!(csv.lines().count(), 1 + doc.features.len());

    // report renders the same file to stdout
    let rep = bin(&["report", "--in", "infer.json"], dir.path());
    assert!(rep.status.success());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("Inference for target \"acid_a\""));
    assert!(text.contains("noise sd"));
}

#[test]
fn select_aux_and_simulate_report_render() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), false);
    write_config(
        dir.path(),
        serde_json::json!({ "selection": { "r0": 0.2, "p0": 0.9, "k_folds": 3, "seed": 3 } }),
    );
    let out = bin(&["select-aux", "--config", "config.json", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = bin(&["report", "--in", "selection.json"], dir.path());
    assert!(rep.status.success());
    assert!(String::from_utf8(rep.stdout).unwrap().contains("Auxiliary selection"));

    let sim = serde_json::json!({
        "n": 30, "p": 16, "s": 3, "theta1": 0.5, "theta2": 0.0, "rho": 0.3,
        "sigma0": 0.2, "sigma1": 0.1, "sigma2": 0.1,
        "n_replications": 2, "seed": 4, "methods": ["commit", "lasso"],
        "cv_folds": 3, "n_lambda": 25
    });
    std::fs::write(dir.path().join("sim.json"), sim.to_string()).unwrap();
    let out = bin(&["simulate", "--config", "sim.json", "--out", "simout"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = bin(&["report", "--in", "simout/simulation_report.json"], dir.path());
    assert!(rep.status.success());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("Simulation study"));
    assert!(text.contains("commit"));

    let records =
        std::fs::read_to_string(dir.path().join("simout/simulation_records.csv")).unwrap();
    assert!(records.starts_with("replication,stream,method,mse"));
    assert_eq!(records.lines().count(), 1 + 2 * 2, "2 methods x 2 replications");
}

#[test]
fn missing_rows_are_dropped_with_a_note() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), true);
    write_config(dir.path(), serde_json::json!({}));
    let out = bin(&["fit", "--config", "config.json", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dropped 1 incomplete rows"));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(doc["meta"]["dropped_rows"], serde_json::json!(1));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), false);

    // usage error: unknown outcome name -> 1
    write_config(dir.path(), serde_json::json!({ "target": "Acid_A" }));
    let out = bin(&["fit", "--config", "config.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap())
            .unwrap();
    assert_eq!(err["error"]["kind"], "unknown_outcome");
    assert_eq!(err["error"]["exit_code"], 1);

    // usage error: unknown flag -> 1
    let out = bin(&["fit", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // data error: missing file -> 2
    write_config(dir.path(), serde_json::json!({ "microbe_csv": "nope.csv" }));
    let out = bin(&["fit", "--config", "config.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // data error: non-numeric cell -> 2
    std::fs::write(dir.path().join("bad.csv"), "sample,g1,g2\ns1,1,2\ns2,x,3\n").unwrap();
    write_config(dir.path(), serde_json::json!({ "microbe_csv": "bad.csv" }));
    let out = bin(&["fit", "--config", "config.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap())
            .unwrap();
    assert_eq!(err["error"]["kind"], "non_numeric_cell");

    // usage error: simulation layout violation -> 1
    std::fs::write(
        dir.path().join("sim.json"),
        serde_json::json!({
            "n": 30, "p": 10, "s": 4, "theta1": 0.5, "theta2": 0.0, "rho": 0.3,
            "sigma0": 0.2, "sigma1": 0.1, "sigma2": 0.1, "seed": 1
        })
        .to_string(),
    )
    .unwrap();
    let out = bin(&["simulate", "--config", "sim.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // report on a missing file -> 2
    let out = bin(&["report", "--in", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // --help exits 0
    let out = bin(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn set_overrides_change_behavior() {
    let dir = tempfile::tempdir().unwrap();
    write_tables(dir.path(), false);
    write_config(dir.path(), serde_json::json!({}));
    let out = bin(
        &[
            "fit",
            "--config",
            "config.json",
            "--set",
            "candidates=[]",
            "--out",
            "over",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("over/fit.json")).unwrap())
            .unwrap();
    assert_eq!(doc["no_auxiliaries"], serde_json::json!(true));
}
