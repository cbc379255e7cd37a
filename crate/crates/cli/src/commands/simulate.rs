use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use factorial_screen::calibrate::CalibrationFile;
use factorial_screen::simstudy::{read_scenarios, run_study, scenario_seed, table1_scenarios, write_study, Scenario};
use factorial_screen::{Executor, MethodKind};
use serde::{Deserialize, Serialize};

use super::parse_methods;
use crate::manifest::{sha256_file, RunManifest, MANIFEST_NAME};
use crate::SimulateArgs;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StreamOffset {
    scenario: String,
    stream_offset: u64,
}

/// Config echo stored in the manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SimConfig {
    scenarios_source: String,
    scenarios: Vec<Scenario>,
    methods: Vec<MethodKind>,
    reps: usize,
    seed: u64,
    calib: PathBuf,
    calib_sha256: String,
    streams: Vec<StreamOffset>,
}

fn config_from_args(a: &SimulateArgs) -> Result<SimConfig> {
    let scenarios = if a.scenarios == "table1" {
        table1_scenarios()
    } else {
        let mut list = read_scenarios(a.scenarios.as_ref())
            .with_context(|| format!("reading scenarios from {}", a.scenarios))?;
        if a.sd_ratio {
            for s in &mut list {
                s.delta *= s.delta;
            }
        }
        list
    };
    let calib = a.calib.clone().expect("clap requires --calib");
    let seed = a.seed.expect("clap requires --seed");
    Ok(SimConfig {
        scenarios_source: a.scenarios.clone(),
        methods: parse_methods(&a.methods)?,
        reps: a.reps,
        seed,
        calib_sha256: sha256_file(&calib)?,
        calib,
        streams: scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| StreamOffset { scenario: s.id(), stream_offset: scenario_seed(seed, i).stream_index })
            .collect(),
        scenarios,
    })
}

fn config_from_manifest(path: &std::path::Path) -> Result<SimConfig> {
    let m = RunManifest::read(path)?;
    if m.subcommand != "simulate" {
        bail!("{} records a '{}' run, not simulate", path.display(), m.subcommand);
    }
    let cfg: SimConfig = serde_json::from_value(m.config).context("manifest config is not a simulate config")?;
    let digest = sha256_file(&cfg.calib)?;
    if digest != cfg.calib_sha256 {
        bail!("calibration file {} changed since the recorded run", cfg.calib.display());
    }
    Ok(cfg)
}

pub fn run(a: SimulateArgs, exec: &Executor) -> Result<()> {
    let cfg = match &a.from_manifest {
        Some(p) => config_from_manifest(p)?,
        None => config_from_args(&a)?,
    };
    let calib = CalibrationFile::read(&cfg.calib).with_context(|| format!("reading {}", cfg.calib.display()))?;
    let mut manifest = RunManifest::start("simulate", Some(cfg.seed), serde_json::to_value(&cfg)?);
    manifest.add_input(&cfg.calib)?;
    if cfg.scenarios_source != "table1" && a.from_manifest.is_none() {
        manifest.add_input(cfg.scenarios_source.as_ref())?;
    }
    let runs = run_study(&cfg.scenarios, &cfg.methods, &calib, cfg.reps, cfg.seed, exec)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_study(&runs, &a.out)?;
    manifest.finish(&a.out.join(MANIFEST_NAME))
}
