//! End-to-end runs of the command-line binary: artifact layout, exit
//! codes, environment handling, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lane-emden-annulus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn missing_required_flags_exit_with_usage_code() {
    let out = run(&["solve-radial", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_subcommands_exit_with_usage_code() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_exponent_exits_with_usage_code_and_names_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "solve-radial",
        "--a",
        "1",
        "--b",
        "2",
        "--p",
        "0.5",
        "--m",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p > 1"), "stderr: {}", stderr(&out));
}

#[test]
fn degenerate_annulus_exits_with_usage_code() {
    let out = run(&[
        "solve-radial", "--a", "2", "--b", "2", "--p", "3", "--m", "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn folding_deformation_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fold.toml");
    std::fs::write(
        &cfg,
        "a = 1.0\nb = 2.0\np = 3.0\nm = 1\nt = 0.9\nn_r = 16\nn_theta = 8\nouter = [[2, 1.6, 0.0]]\n",
    )
    .unwrap();
    let out = run(&[
        "--out",
        dir.path().join("run").to_str().unwrap(),
        "perturb",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("folds"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_config_file_exits_with_usage_code() {
    let out = run(&["perturb", "--config", "/nonexistent/nope.toml"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn solve_radial_writes_the_documented_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "solve-radial",
        "--a",
        "1",
        "--b",
        "2",
        "--N",
        "3",
        "--p",
        "3",
        "--m",
        "2",
        "--intervals",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = read(&dir.path().join("profile.csv"));
    assert!(csv.starts_with("r,v,dv\n"));
    assert_eq!(csv.lines().count(), 258, "header + 257 grid nodes");

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("profile.json"))).unwrap();
    assert_eq!(json["N"], 3);
    assert_eq!(json["m"], 2);
    assert_eq!(json["zeros"].as_array().unwrap().len(), 1);
    assert_eq!(json["config"]["intervals"], 256);
    assert!(json["sup_norm"].as_f64().unwrap() > 0.0);

    let plot = read(&dir.path().join("plot/profile.dat"));
    let first = plot.lines().next().unwrap();
    assert_eq!(first.split_whitespace().count(), 2);
}

#[test]
fn spectrum_writes_eigenvalue_tables_and_per_mode_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "spectrum",
        "--a",
        "1",
        "--b",
        "2",
        "--p",
        "2",
        "--m",
        "2",
        "--modes",
        "3",
        "--intervals",
        "512",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = read(&dir.path().join("spectrum.csv"));
    assert_eq!(csv.lines().count(), 4, "header + 3 modes");
    let funcs = read(&dir.path().join("eigenfunctions.csv"));
    assert!(funcs.starts_with("r,phi_1,phi_2,phi_3\n"));

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("spectrum.json"))).unwrap();
    assert_eq!(json["negative_count"], 2);
    assert_eq!(json["sign_changes"], serde_json::json!([0, 1, 2]));

    for l in 1..=3 {
        assert!(dir.path().join(format!("plot/phi_{l}.dat")).exists());
    }
}

#[test]
fn scan_degeneracy_records_crossings_and_curve_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "scan-degeneracy",
        "--a",
        "1",
        "--b",
        "2",
        "--m",
        "1",
        "--p-min",
        "1.02",
        "--p-max",
        "1.1",
        "--j-max",
        "1",
        "--samples",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = read(&dir.path().join("degeneracy.csv"));
    assert_eq!(csv.lines().count(), 2, "header + the j = 1 crossing:\n{csv}");
    let line = csv.lines().nth(1).unwrap();
    let p_k: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((1.02..1.1).contains(&p_k), "crossing at {p_k}");

    let curve = read(&dir.path().join("plot/nu_1.dat"));
    assert!(curve.lines().count() >= 8);
    assert!(dir.path().join("plot/degeneracies.dat").exists());

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("degeneracy.json"))).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), 1);
    assert_eq!(json["config"]["j_max"], 1);
}

#[test]
fn morse_emits_one_row_per_exponent_with_zone_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "morse",
        "--a",
        "1",
        "--b",
        "2",
        "--m",
        "2",
        "--p",
        "1.5,3",
        "--intervals",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = read(&dir.path().join("morse.csv"));
    assert!(csv.starts_with("p,morse_index,J_1,J_2\n"));
    assert_eq!(csv.lines().count(), 3);

    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(stdout.contains("lower bound 4"), "stdout: {stdout}");
}

#[test]
fn asymptotics_writes_both_regime_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        dir.path().to_str().unwrap(),
        "asymptotics",
        "--a",
        "1",
        "--b",
        "2",
        "--m",
        "1",
        "--p-to-1",
        "1.1,1.05",
        "--large-p",
        "2,3",
        "--intervals",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    assert_eq!(read(&dir.path().join("linear_limit.csv")).lines().count(), 3);
    assert_eq!(read(&dir.path().join("large_p.csv")).lines().count(), 3);

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("asymptotics.json"))).unwrap();
    let l1 = json["lambda_1"].as_f64().unwrap();
    let lm = json["lambda_m"].as_f64().unwrap();
    assert!(l1 > 0.0 && (lm - l1).abs() < 1e-12, "m = 1 so lambda_m = lambda_1");
    for row in json["large_p"].as_array().unwrap() {
        assert!(row["margin"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn perturb_applies_flag_overrides_on_top_of_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bend.toml");
    std::fs::write(
        &cfg,
        "a = 1.0\nb = 2.0\np = 3.0\nm = 1\nt = 0.5\nn_r = 16\nn_theta = 8\nouter = [[2, 0.05, 0.0]]\n",
    )
    .unwrap();
    let out = run(&[
        "--out",
        dir.path().join("run").to_str().unwrap(),
        "perturb",
        "--config",
        cfg.to_str().unwrap(),
        "--t",
        "0.1",
        "--steps",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("run/run.json"))).unwrap();
    assert_eq!(json["t"], 0.1, "flag wins over the config value 0.5");
    assert_eq!(json["iterations"].as_array().unwrap().len(), 2);
    assert_eq!(json["nodal_count"], 1);
    assert_eq!(json["config"]["t"], 0.1, "echoed config reflects the override");

    let csv = read(&dir.path().join("run/solution.csv"));
    assert_eq!(csv.lines().count(), 1 + 17 * 8, "header + (n_r+1) * n_theta");
    assert!(dir.path().join("run/plot/section.dat").exists());
}

#[test]
fn output_directory_falls_back_to_the_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let via_env = dir.path().join("from_env");
    let out = bin()
        .env("LANE_EMDEN_OUT", &via_env)
        .args(["solve-radial", "--a", "1", "--b", "2", "--p", "3", "--m", "1", "--intervals", "64"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(via_env.join("profile.csv").exists());

    // An explicit flag beats the variable.
    let via_flag = dir.path().join("from_flag");
    let out = bin()
        .env("LANE_EMDEN_OUT", dir.path().join("ignored"))
        .args([
            "--out",
            via_flag.to_str().unwrap(),
            "solve-radial",
            "--a",
            "1",
            "--b",
            "2",
            "--p",
            "3",
            "--m",
            "1",
            "--intervals",
            "64",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(via_flag.join("profile.csv").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn repeated_runs_produce_byte_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "solve-radial", "--a", "1", "--b", "2", "--p", "3", "--m", "2", "--intervals", "128",
    ];
    for sub in ["one", "two"] {
        let out = bin()
            .arg("--out")
            .arg(dir.path().join(sub))
            .args(args)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    for name in ["profile.csv", "profile.json", "plot/profile.dat"] {
        let a = std::fs::read(dir.path().join("one").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("two").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}
