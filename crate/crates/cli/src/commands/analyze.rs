use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use factorial_screen::calibrate::{calibrate_all, CalibrationFile, CalibrationOptions};
use factorial_screen::experiment::read_experiment;
use factorial_screen::methods::analyze_all;
use factorial_screen::{estimate_effects, EffectEstimates, Executor, MethodDecision, MethodKind, SeedSpec};
use serde_json::json;

use super::parse_methods;
use crate::manifest::RunManifest;
use crate::AnalyzeArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Pretty,
}

pub const COLUMNS: [&str; 10] = [
    "effect",
    "estimate",
    "len89_stat",
    "len89_active",
    "bp91_stat",
    "bp91_active",
    "bm86_posterior",
    "bm86_active",
    "ln97_p",
    "ln97_active",
];

const COLUMN_METHODS: [MethodKind; 4] = [MethodKind::Len89, MethodKind::Bp91, MethodKind::Bm86, MethodKind::Ln97];

/// One row per effect; columns of methods that were not run stay empty.
fn table_rows(est: &EffectEstimates, decisions: &[MethodDecision]) -> Vec<Vec<String>> {
    (0..est.m())
        .map(|j| {
            let mut row = vec![factorial_screen::EffectId::new(j + 1, est.design_k).map(|e| e.label()).unwrap_or_default()];
            row.push((est.values[j] + 0.0).to_string());
            for m in COLUMN_METHODS {
                match decisions.iter().find(|d| d.method == m) {
                    Some(d) => {
                        row.push(d.per_effect[j].statistic.to_string());
                        row.push(d.per_effect[j].active.to_string());
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            row
        })
        .collect()
}

fn render(rows: &[Vec<String>], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for r in rows {
                w.write_record(r)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
        }
        TableFormat::Pretty => {
            let mut width: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
            for r in rows {
                for (w, cell) in width.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut s = String::new();
            let line = |s: &mut String, cells: &[&str]| {
                let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
                let _ = writeln!(s, "{}", parts.join("  ").trim_end());
            };
            line(&mut s, &COLUMNS);
            for r in rows {
                let cells: Vec<&str> = r.iter().map(String::as_str).collect();
                line(&mut s, &cells);
            }
            Ok(s)
        }
    }
}

pub fn run(a: AnalyzeArgs, exec: &Executor) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let exp = read_experiment(&a.experiment)?;
    let k = exp.design.k();
    let (calib, calib_source) = match &a.calib {
        Some(p) => (
            CalibrationFile::read(p).with_context(|| format!("reading {}", p.display()))?,
            p.display().to_string(),
        ),
        None => {
            let opts = CalibrationOptions { k, ..CalibrationOptions::default() };
            let c = calibrate_all(&methods, 0.05, a.calib_reps, SeedSpec::new(a.seed, 0), &opts, exec)?;
            (c, "on-the-fly".to_string())
        }
    };
    calib.require(&methods)?;
    if calib.k() != k {
        bail!("calibration is for k={} but the experiment has k={k}", calib.k());
    }
    let mut cfg = calib.config.clone();
    if let Some(p) = a.permutations {
        cfg.ln97.n_permutations = p;
    }
    cfg.validate(k)?;

    let mut manifest = RunManifest::start(
        "analyze",
        Some(a.seed),
        json!({
            "experiment": a.experiment.display().to_string(),
            "methods": methods,
            "seed": a.seed,
            "ln97_permutations": cfg.ln97.n_permutations,
            "calibration": {
                "source": calib_source,
                "target_ier": calib.target_ier,
                "n_reps": calib.n_reps,
                "seed": calib.seed,
                "options": calib.options,
            },
            "config": cfg,
        }),
    );
    manifest.add_input(&a.experiment)?;
    if let Some(p) = &a.calib {
        manifest.add_input(p)?;
    }

    let est = estimate_effects(&exp.design, &exp.y)?;
    let decisions = analyze_all(&exp.design, &exp.y, &est, &cfg, &methods, SeedSpec::new(a.seed, 0))?;
    let table = render(&table_rows(&est, &decisions), a.format)?;

    match &a.out {
        None => print!("{table}"),
        Some(out) => {
            std::fs::write(out, &table).with_context(|| format!("writing {}", out.display()))?;
            let mut side = out.clone().into_os_string();
            side.push(".json");
            if let serde_json::Value::Object(c) = &mut manifest.config {
                c.insert("decisions".into(), serde_json::to_value(&decisions)?);
                c.insert("intercept".into(), json!(est.intercept));
            }
            manifest.finish(std::path::Path::new(&side))?;
        }
    }
    Ok(())
}
