//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bridgestep"))
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Recorded impact factors for a 10 m span, 13 m axle distance, over the
/// six-step grid; the proper steps are 0.05 / 0.025 / 0.015 / 0.01.
fn recorded_results_csv(extra_column: bool) -> String {
    let rows: [((&str, &str), [f64; 6]); 4] = [
        (("109.000", "0.05"), [0.08242, 0.08242, 0.08576, 0.08576, 0.08576, 0.08596]),
        (("118.000", "0.025"), [0.10283, 0.12949, 0.12990, 0.13222, 0.13222, 0.13222]),
        (("145.000", "0.015"), [0.14808, 0.14808, 0.16465, 0.16010, 0.16465, 0.16465]),
        (("208.000", "0.01"), [0.19798, 0.19798, 0.19798, 0.22182, 0.22778, 0.22919]),
    ];
    let dts = ["0.05", "0.025", "0.015", "0.01", "0.005", "0.0025"];
    let mut text = String::new();
    if extra_column {
        text.push_str("span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor,note\n");
    } else {
        text.push_str("span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor\n");
    }
    for ((speed, _), factors) in rows.iter() {
        for (dt, factor) in dts.iter().zip(factors.iter()) {
            let base = format!("10,13,{speed},{dt},0.001,0.001,{factor:.5}");
            if extra_column {
                text.push_str(&format!("{base},x\n"));
            } else {
                text.push_str(&format!("{base}\n"));
            }
        }
    }
    text
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn analyze_prints_impact_factor_line() {
    let output = bin()
        .args([
            "analyze", "--span", "15", "--f1", "8", "--axle-distance", "13", "--speed-kmh",
            "375", "--dt", "0.0025",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("span_m=15"), "{text}");
    assert!(text.contains("dt_s=0.0025"), "{text}");
    let factor = text
        .split("impact_factor=")
        .nth(1)
        .map(|s| s.trim())
        .unwrap();
    let decimals = factor.split('.').nth(1).unwrap();
    assert_eq!(decimals.len(), 5, "impact factor must carry 5 decimals: {factor}");
}

#[test]
fn analyze_rejects_oversized_time_step() {
    let output = bin()
        .args([
            "analyze", "--span", "15", "--f1", "8", "--speed-kmh", "375", "--dt", "50",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("--dt"), "{}", stderr(&output));
}

#[test]
fn analyze_rejects_zero_axle_load() {
    let output = bin()
        .args([
            "analyze", "--span", "15", "--f1", "8", "--speed-kmh", "375", "--dt", "0.01",
            "--axle-load-ton", "0",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("--axle-load-ton"), "{}", stderr(&output));
}

#[test]
fn analyze_writes_history_series() {
    let dir = tempfile::tempdir().unwrap();
    let history = dir.path().join("history.csv");
    let output = bin()
        .args([
            "analyze", "--span", "10", "--f1", "12", "--axles", "1", "--speed-kmh", "200",
            "--dt", "0.005", "--history",
        ])
        .arg(&history)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = std::fs::read_to_string(&history).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_s,midpoint_deflection_m"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 10);
    assert!(rows[0].starts_with("0,"));
}

#[test]
fn recommend_prints_six_significant_digits() {
    let output = bin()
        .args(["recommend", "--span", "10", "--speed-kmh", "375"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("0.00187200"), "{text}");

    let output = bin()
        .args(["recommend", "--span", "25", "--speed-kmh", "406"])
        .output()
        .unwrap();
    let value: f64 = stdout(&output).split_whitespace().next().unwrap().parse().unwrap();
    let expected = 0.0195 * 25.0 / (406.0 / 3.6);
    assert!((value - expected).abs() < 1e-8, "{value} vs {expected}");
    assert!((value - 0.00432).abs() < 5e-6);
}

#[test]
fn recommend_is_linear_in_k() {
    let base: f64 = {
        let output = bin()
            .args(["recommend", "--span", "10", "--speed-kmh", "375"])
            .output()
            .unwrap();
        stdout(&output).split_whitespace().next().unwrap().parse().unwrap()
    };
    let doubled: f64 = {
        let output = bin()
            .args(["recommend", "--span", "10", "--speed-kmh", "375", "--k", "0.039"])
            .output()
            .unwrap();
        stdout(&output).split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!((doubled - 2.0 * base).abs() < 1e-9);
}

#[test]
fn recommend_rejects_non_positive_inputs() {
    let output = bin()
        .args(["recommend", "--span", "-10", "--speed-kmh", "375"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("--span"));
}

const QUICK_CONFIG: &str = "\
speeds = [109.0, 208.0, 300.0]
dt_grid_s = [0.02, 0.01]
workers = 2

[[bridges]]
span_m = 10.0
f1_hz = 12.0

[train]
axle_spacing_m = 13.0
";

#[test]
fn sweep_writes_results_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    write(&config, QUICK_CONFIG);
    let out = dir.path().join("out");
    let output = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));

    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines.len(), 1 + 6, "header plus 1x1x3x2 rows");
    assert_eq!(
        lines[0],
        "span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor"
    );

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["records_written"], 6);
    assert_eq!(manifest["grid"]["cases"], 6);
    assert!(manifest["config_sha256"].as_str().unwrap().len() == 64);
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(manifest["failed_cases"].as_array().unwrap().is_empty());
    assert!(manifest["defaults_used"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "train.axle_load_ton"));
}

#[test]
fn sweep_output_is_deterministic_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    write(&config, QUICK_CONFIG);
    let run = |out: &Path, workers: &str, env_workers: Option<&str>| {
        let mut cmd = bin();
        cmd.args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out);
        if workers != "config" {
            cmd.args(["--workers", workers]);
        }
        if let Some(w) = env_workers {
            cmd.env("BRIDGESTEP_WORKERS", w);
        }
        let output = cmd.output().unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"), "1", None);
    let b = run(&dir.path().join("b"), "4", None);
    let c = run(&dir.path().join("c"), "config", Some("3"));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn sweep_rejects_unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    write(&config, "not_a_real_key = 5\n");
    let out = dir.path().join("out");
    let output = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!out.join("results.csv").exists(), "no output before validation");
}

#[test]
fn sweep_rejects_empty_speed_list() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    write(&config, "speeds = []\n");
    let output = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn sweep_requires_some_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    write(&config, QUICK_CONFIG);
    let output = bin().args(["sweep", "--config"]).arg(&config).output().unwrap();
    assert!(!output.status.success());
    assert!(stderr(&output).contains("--out"));
}

#[test]
fn select_dt_reproduces_recorded_choices() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(&results, &recorded_results_csv(false));
    let selection = dir.path().join("selection.csv");
    let output = bin()
        .args(["select-dt", "--in"])
        .arg(&results)
        .args(["--tol", "0.01", "--out"])
        .arg(&selection)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let text = std::fs::read_to_string(&selection).unwrap();
    let chosen: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(chosen, vec!["0.05", "0.025", "0.015", "0.01"]);
    // Everything converged in the recorded data.
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("true")));
}

#[test]
fn select_dt_ignores_extra_columns() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.csv");
    let extra = dir.path().join("extra.csv");
    write(&plain, &recorded_results_csv(false));
    write(&extra, &recorded_results_csv(true));
    let out_plain = dir.path().join("sel_plain.csv");
    let out_extra = dir.path().join("sel_extra.csv");
    for (input, out) in [(&plain, &out_plain), (&extra, &out_extra)] {
        let output = bin()
            .args(["select-dt", "--in"])
            .arg(input)
            .args(["--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", stderr(&output));
    }
    assert_eq!(
        std::fs::read(&out_plain).unwrap(),
        std::fs::read(&out_extra).unwrap()
    );
}

#[test]
fn select_dt_degenerate_tolerance_picks_largest_step() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(&results, &recorded_results_csv(false));
    let selection = dir.path().join("selection.csv");
    let output = bin()
        .args(["select-dt", "--in"])
        .arg(&results)
        .args(["--tol", "1e9", "--out"])
        .arg(&selection)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&selection).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(3) == Some("0.05")));
}

#[test]
fn select_dt_handles_two_step_condition() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(
        &results,
        "span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor\n\
         10,13,109.000,0.01,0.001,0.001,0.10000\n\
         10,13,109.000,0.005,0.001,0.001,0.10500\n",
    );
    let selection = dir.path().join("selection.csv");
    let output = bin()
        .args(["select-dt", "--in"])
        .arg(&results)
        .args(["--out"])
        .arg(&selection)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&selection).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("10,13,109.000,0.01,true"));
}

#[test]
fn select_dt_flags_conditions_missing_grid_entries() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(
        &results,
        "span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor\n\
         10,13,109.000,0.01,0.001,0.001,0.10000\n\
         10,13,109.000,0.005,0.001,0.001,0.10100\n\
         10,13,118.000,0.01,0.001,0.001,0.20000\n",
    );
    let selection = dir.path().join("selection.csv");
    let output = bin()
        .args(["select-dt", "--in"])
        .arg(&results)
        .args(["--out"])
        .arg(&selection)
        .output()
        .unwrap();
    assert!(output.status.success(), "partial conditions must not be fatal");
    assert!(stderr(&output).contains("118.000"), "{}", stderr(&output));
    let text = std::fs::read_to_string(&selection).unwrap();
    assert_eq!(text.lines().count(), 2, "only the complete condition selected");
}

#[test]
fn calibrate_reports_recorded_bridge_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let selection = dir.path().join("selection.csv");
    // Recorded k values for a 20 m span across five axle distances.
    write(
        &selection,
        "span_m,axle_distance_m,speed_kmh,chosen_dt_s,converged,k\n\
         20,13,200.000,0.01,true,0.0265\n\
         20,15,200.000,0.01,true,0.0206\n\
         20,17,200.000,0.01,true,0.0276\n\
         20,22,200.000,0.01,true,0.0232\n\
         20,23,200.000,0.01,true,0.0238\n",
    );
    let summary = dir.path().join("summary.json");
    let output = bin()
        .args(["calibrate", "--in"])
        .arg(&selection)
        .args(["--out"])
        .arg(&summary)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert!((json["global_k_min"].as_f64().unwrap() - 0.0206).abs() < 1e-12);
    assert_eq!(json["per_bridge"].as_array().unwrap().len(), 1);
    let bridge = &json["per_bridge"][0];
    assert!((bridge["k_min"].as_f64().unwrap() - 0.0206).abs() < 1e-12);
    let k_mean = bridge["k_mean"].as_f64().unwrap();
    assert!((k_mean - 0.02434).abs() < 1e-9);
}

#[test]
fn calibrate_single_row_has_zero_std() {
    let dir = tempfile::tempdir().unwrap();
    let selection = dir.path().join("selection.csv");
    write(
        &selection,
        "span_m,axle_distance_m,speed_kmh,chosen_dt_s,converged,k\n\
         10,13,109.000,0.05,true,0.151389\n",
    );
    let summary = dir.path().join("summary.json");
    let output = bin()
        .args(["calibrate", "--in"])
        .arg(&selection)
        .args(["--out"])
        .arg(&summary)
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["per_bridge"][0]["k_std"].as_f64().unwrap(), 0.0);
}

#[test]
fn calibrate_rejects_empty_selection() {
    let dir = tempfile::tempdir().unwrap();
    let selection = dir.path().join("selection.csv");
    write(
        &selection,
        "span_m,axle_distance_m,speed_kmh,chosen_dt_s,converged,k\n",
    );
    let output = bin()
        .args(["calibrate", "--in"])
        .arg(&selection)
        .args(["--out"])
        .arg(dir.path().join("summary.json"))
        .output()
        .unwrap();
    assert!(!output.status.success());
}

fn plot_fixture() -> String {
    let mut text =
        String::from("span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor\n");
    for span in [10, 15, 20, 25] {
        for d in [13, 17] {
            for speed in [109, 208, 300] {
                for dt in ["0.01", "0.005"] {
                    text.push_str(&format!("{span},{d},{speed}.000,{dt},0.001,0.001,0.10000\n"));
                }
            }
        }
    }
    text
}

#[test]
fn plot_writes_one_chart_and_csv_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(&results, &plot_fixture());
    let charts = dir.path().join("charts");
    let output = bin()
        .args(["plot", "--in"])
        .arg(&results)
        .args(["--out"])
        .arg(&charts)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    let mut svgs = 0;
    let mut csvs = 0;
    for entry in std::fs::read_dir(&charts).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name.ends_with(".svg") {
            svgs += 1;
        } else if name.ends_with(".csv") {
            csvs += 1;
        }
    }
    assert_eq!((svgs, csvs), (8, 8));

    let svg = std::fs::read_to_string(charts.join("if_L10_d13.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2, "one series per dt");
    let csv = std::fs::read_to_string(charts.join("if_L10_d13.csv")).unwrap();
    assert!(csv.starts_with("speed_kmh,if_dt_0.01,if_dt_0.005"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn plot_with_empty_results_warns_and_exits_clean() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.csv");
    write(
        &results,
        "span_m,axle_distance_m,speed_kmh,dt_s,d_dyn_m,d_st_m,impact_factor\n",
    );
    let charts = dir.path().join("charts");
    let output = bin()
        .args(["plot", "--in"])
        .arg(&results)
        .args(["--out"])
        .arg(&charts)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stderr(&output).contains("nothing to plot"));
    assert!(!charts.exists(), "no files for empty input");
}
