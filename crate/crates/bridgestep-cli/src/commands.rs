use crate::chart::{self, Series};
use crate::config;
use crate::table::{self, format_sig, ResultRow, SelectionRow};
use anyhow::{anyhow, bail, Context, Result};
use bridgestep::{
    aggregate_k, impact_factor, max_static_sweep, recommended_dt, run_study, select_proper_dt,
    solve_case, AnalysisCase, BridgeSpec, TrainSpec,
};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct AnalyzeOpts {
    pub span: f64,
    pub f1: f64,
    pub damping: f64,
    pub modes: usize,
    pub axle_load_ton: f64,
    pub axles: usize,
    pub axle_distance: f64,
    pub speed_kmh: f64,
    pub dt: f64,
    pub history: Option<PathBuf>,
}

fn require_positive(value: f64, flag: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        bail!("{flag} must be positive, got {value}")
    }
}

pub fn analyze(opts: &AnalyzeOpts) -> Result<()> {
    let span = require_positive(opts.span, "--span")?;
    let f1 = require_positive(opts.f1, "--f1")?;
    if !(0.0..1.0).contains(&opts.damping) {
        bail!("--damping must lie in [0, 1), got {}", opts.damping);
    }
    if opts.modes == 0 {
        bail!("--modes must be at least 1");
    }
    let load_ton = require_positive(opts.axle_load_ton, "--axle-load-ton")?;
    if opts.axles == 0 {
        bail!("--axles must be at least 1");
    }
    let distance = require_positive(opts.axle_distance, "--axle-distance")?;
    let speed = require_positive(opts.speed_kmh, "--speed-kmh")? / 3.6;
    let dt = require_positive(opts.dt, "--dt")?;

    let bridge = BridgeSpec::new(span, f1)
        .and_then(|b| b.with_damping(opts.damping))
        .and_then(|b| b.with_mode_count(opts.modes))
        .map_err(|e| anyhow!("invalid bridge flags: {e}"))?;
    let train = TrainSpec::from_tons(load_ton, opts.axles, distance)
        .map_err(|e| anyhow!("invalid train flags: {e}"))?;
    let case = AnalysisCase::new(bridge, train, speed, dt)
        .map_err(|e| anyhow!("--dt unusable for this case: {e}"))?;

    let history = solve_case(&case)?;
    let d_st = max_static_sweep(&bridge, &train).max_midpoint_deflection_m;
    let factor = impact_factor(history.max_abs_deflection_m, d_st)?;

    println!(
        "span_m={} speed_kmh={} dt_s={} d_dyn_m={} d_st_m={} impact_factor={:.5}",
        span,
        format_sig(opts.speed_kmh, 6),
        dt,
        format_sig(history.max_abs_deflection_m, 6),
        format_sig(d_st, 6),
        factor
    );

    if let Some(path) = &opts.history {
        let mut text = String::from("t_s,midpoint_deflection_m\n");
        for (t, u) in history.times_s.iter().zip(history.midpoint_deflection_m.iter()) {
            text.push_str(&format!("{t},{u}\n"));
        }
        std::fs::write(path, text)
            .with_context(|| format!("cannot write --history {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn resolve_workers(flag: Option<usize>, from_config: Option<usize>) -> Result<Option<usize>> {
    let chosen = if flag.is_some() {
        flag
    } else if let Ok(text) = std::env::var("BRIDGESTEP_WORKERS") {
        let parsed: usize = text
            .trim()
            .parse()
            .with_context(|| format!("BRIDGESTEP_WORKERS must be an integer, got '{text}'"))?;
        Some(parsed)
    } else {
        from_config
    };
    if chosen == Some(0) {
        bail!("worker count must be positive");
    }
    Ok(chosen)
}

pub fn sweep(config_path: &Path, out: Option<PathBuf>, workers: Option<usize>) -> Result<()> {
    let raw = std::fs::read(config_path)
        .with_context(|| format!("cannot read --config {}", config_path.display()))?;
    let config_sha256 = hex_digest(&raw);
    let text = String::from_utf8(raw).context("config is not UTF-8")?;
    let config = config::parse_config(&text)
        .with_context(|| format!("--config {}", config_path.display()))?;

    let out_dir = out
        .or(config.output_dir.clone())
        .ok_or_else(|| anyhow!("no output directory: pass --out or set output_dir in the config"))?;
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create --out {}", out_dir.display()))?;
    let probe = out_dir.join(".write-probe");
    std::fs::write(&probe, b"")
        .with_context(|| format!("--out {} is not writable", out_dir.display()))?;
    let _ = std::fs::remove_file(&probe);

    let workers = resolve_workers(workers, config.workers)?;
    let grid = &config.grid;
    let case_count = grid.bridges.len()
        * grid.axle_distances_m.len()
        * grid.speeds_m_s.len()
        * grid.dt_grid_s.len();
    eprintln!(
        "sweeping {} cases ({} bridges x {} distances x {} speeds x {} steps) on {} workers",
        case_count,
        grid.bridges.len(),
        grid.axle_distances_m.len(),
        grid.speeds_m_s.len(),
        grid.dt_grid_s.len(),
        workers.map_or_else(|| "default".to_string(), |w| w.to_string()),
    );

    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .context("cannot build worker pool")?;
    let output = pool.install(|| run_study(grid))?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let results_path = out_dir.join("results.csv");
    table::write_results_csv(&results_path, &output.records)?;

    let failed: Vec<serde_json::Value> = output
        .failures
        .iter()
        .map(|f| {
            serde_json::json!({
                "span_m": f.key.span_m,
                "axle_distance_m": f.key.axle_distance_m,
                "speed_kmh": f.key.speed_m_s * 3.6,
                "dt_s": f.key.dt_s,
                "error": f.message,
            })
        })
        .collect();
    let manifest = serde_json::json!({
        "config_sha256": config_sha256,
        "defaults_used": config.defaults_used,
        "workers": workers,
        "grid": {
            "bridges": grid.bridges.len(),
            "axle_distances": grid.axle_distances_m.len(),
            "speeds": grid.speeds_m_s.len(),
            "dt_steps": grid.dt_grid_s.len(),
            "conditions": grid.bridges.len() * grid.axle_distances_m.len() * grid.speeds_m_s.len(),
            "cases": case_count,
        },
        "if_tolerance": grid.if_tolerance,
        "records_written": output.records.len(),
        "failed_cases": failed,
        "wall_time_s": wall_time_s,
    });
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    println!(
        "wrote {} ({} rows) and {} in {:.2} s",
        results_path.display(),
        output.records.len(),
        manifest_path.display(),
        wall_time_s
    );
    if !output.failures.is_empty() {
        eprintln!("warning: {} case(s) failed; see manifest.json", output.failures.len());
    }
    Ok(())
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Condition key as exact file text, ordered numerically.
#[derive(Debug, Clone, PartialEq)]
struct GroupKey {
    span: f64,
    distance: f64,
    speed: f64,
    span_text: String,
    distance_text: String,
    speed_text: String,
}

fn group_rows(rows: &[ResultRow]) -> Vec<(GroupKey, Vec<&ResultRow>)> {
    let mut index: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    let mut groups: Vec<(GroupKey, Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        let text_key = (
            row.span_text.clone(),
            row.distance_text.clone(),
            row.speed_text.clone(),
        );
        match index.get(&text_key) {
            Some(&i) => groups[i].1.push(row),
            None => {
                index.insert(text_key, groups.len());
                groups.push((
                    GroupKey {
                        span: row.span_m,
                        distance: row.axle_distance_m,
                        speed: row.speed_kmh,
                        span_text: row.span_text.clone(),
                        distance_text: row.distance_text.clone(),
                        speed_text: row.speed_text.clone(),
                    },
                    vec![row],
                ));
            }
        }
    }
    groups.sort_by(|a, b| {
        a.0.span
            .total_cmp(&b.0.span)
            .then(a.0.distance.total_cmp(&b.0.distance))
            .then(a.0.speed.total_cmp(&b.0.speed))
    });
    groups
}

pub fn select_dt(input: &Path, tolerance: f64, out: &Path) -> Result<()> {
    let tolerance = require_positive(tolerance, "--tol")?;
    let rows = table::read_results_csv(input)?;
    if rows.is_empty() {
        bail!("{} has no data rows", input.display());
    }

    // The expected step grid is the union of every step in the file.
    let mut grid: Vec<f64> = Vec::new();
    for row in &rows {
        if !grid.contains(&row.dt_s) {
            grid.push(row.dt_s);
        }
    }
    grid.sort_by(|a, b| b.total_cmp(a));

    let mut selections = Vec::new();
    let mut skipped = 0usize;
    for (key, members) in group_rows(&rows) {
        let mut if_by_dt: Vec<(f64, f64)> = members
            .iter()
            .map(|r| (r.dt_s, r.impact_factor))
            .collect();
        if_by_dt.sort_by(|a, b| b.0.total_cmp(&a.0));
        let complete = if_by_dt.len() == grid.len()
            && if_by_dt.iter().zip(grid.iter()).all(|(a, &g)| a.0 == g);
        if !complete {
            eprintln!(
                "warning: condition (span {}, distance {}, speed {}) misses part of the dt grid; skipped",
                key.span_text, key.distance_text, key.speed_text
            );
            skipped += 1;
            continue;
        }
        match select_proper_dt(&if_by_dt, tolerance) {
            Ok((chosen_dt_s, converged)) => selections.push(SelectionRow {
                span_text: key.span_text,
                distance_text: key.distance_text,
                speed_text: key.speed_text,
                chosen_dt_s,
                converged,
                k: bridgestep::k_coefficient(chosen_dt_s, key.speed / 3.6, key.span),
            }),
            Err(err) => {
                eprintln!(
                    "warning: condition (span {}, distance {}, speed {}): {err}; skipped",
                    key.span_text, key.distance_text, key.speed_text
                );
                skipped += 1;
            }
        }
    }

    table::write_selection_csv(out, &selections)?;
    println!(
        "wrote {} ({} selections, {} skipped)",
        out.display(),
        selections.len(),
        skipped
    );
    Ok(())
}

pub fn calibrate(input: &Path, out: &Path) -> Result<()> {
    let selections = table::read_selection_csv(input)?;
    if selections.is_empty() {
        bail!("{} has no selection rows", input.display());
    }
    let report = aggregate_k(selections)?;
    let per_bridge: Vec<serde_json::Value> = report
        .per_bridge
        .iter()
        .map(|b| {
            serde_json::json!({
                "span_m": b.span_m,
                "k_min": b.k_min,
                "k_mean": b.k_mean,
                "k_std": b.k_std,
                "condition_count": b.condition_count,
            })
        })
        .collect();
    let summary = serde_json::json!({
        "global_k_min": report.global_k_min,
        "per_bridge": per_bridge,
    });
    std::fs::write(out, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("cannot write {}", out.display()))?;
    println!("wrote {} (global_k_min = {})", out.display(), format_sig(report.global_k_min, 6));
    Ok(())
}

pub fn recommend(span: f64, speed_kmh: f64, k: f64) -> Result<()> {
    let span = require_positive(span, "--span")?;
    let speed = require_positive(speed_kmh, "--speed-kmh")? / 3.6;
    let k = require_positive(k, "--k")?;
    println!("{} s", format_sig(recommended_dt(span, speed, k), 6));
    Ok(())
}

pub fn plot(input: &Path, out_dir: &Path) -> Result<()> {
    let rows = table::read_results_csv(input)?;
    if rows.is_empty() {
        eprintln!("warning: {} has no data rows; nothing to plot", input.display());
        return Ok(());
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create --out {}", out_dir.display()))?;

    // Group by (span, distance); one chart per pair.
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for row in &rows {
        if !pairs.contains(&(row.span_m, row.axle_distance_m)) {
            pairs.push((row.span_m, row.axle_distance_m));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut written = 0usize;
    for (span, distance) in pairs {
        let members: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.span_m == span && r.axle_distance_m == distance)
            .collect();
        let mut dts: Vec<f64> = Vec::new();
        for row in &members {
            if !dts.contains(&row.dt_s) {
                dts.push(row.dt_s);
            }
        }
        dts.sort_by(|a, b| b.total_cmp(a));
        let mut speeds: Vec<f64> = Vec::new();
        for row in &members {
            if !speeds.contains(&row.speed_kmh) {
                speeds.push(row.speed_kmh);
            }
        }
        speeds.sort_by(|a, b| a.total_cmp(b));

        let series: Vec<Series> = dts
            .iter()
            .map(|&dt| {
                let mut points: Vec<(f64, f64)> = members
                    .iter()
                    .filter(|r| r.dt_s == dt)
                    .map(|r| (r.speed_kmh, r.impact_factor))
                    .collect();
                points.sort_by(|a, b| a.0.total_cmp(&b.0));
                Series {
                    label: format!("dt = {dt} s"),
                    points,
                }
            })
            .collect();

        let stem = format!("if_L{span}_d{distance}");
        let title = format!("Impact factor, L = {span} m, d = {distance} m");
        if let Some(svg) = chart::line_chart(&title, "Speed (km/h)", "Impact factor", &series) {
            let svg_path = out_dir.join(format!("{stem}.svg"));
            std::fs::write(&svg_path, svg)
                .with_context(|| format!("cannot write {}", svg_path.display()))?;

            let mut csv_text = String::from("speed_kmh");
            for dt in &dts {
                csv_text.push_str(&format!(",if_dt_{dt}"));
            }
            csv_text.push('\n');
            for &speed in &speeds {
                csv_text.push_str(&format_sig(speed, 6));
                for &dt in &dts {
                    let cell = members
                        .iter()
                        .find(|r| r.dt_s == dt && r.speed_kmh == speed)
                        .map(|r| format!("{:.5}", r.impact_factor))
                        .unwrap_or_default();
                    csv_text.push(',');
                    csv_text.push_str(&cell);
                }
                csv_text.push('\n');
            }
            let csv_path = out_dir.join(format!("{stem}.csv"));
            std::fs::write(&csv_path, csv_text)
                .with_context(|| format!("cannot write {}", csv_path.display()))?;
            written += 2;
        }
    }
    println!("wrote {written} files to {}", out_dir.display());
    Ok(())
}
