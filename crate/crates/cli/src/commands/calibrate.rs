use anyhow::{Context, Result};
use factorial_screen::calibrate::{calibrate_all, CalibrationOptions};
use factorial_screen::{Executor, SeedSpec};
use serde_json::json;

use super::parse_methods;
use crate::manifest::RunManifest;
use crate::CalibrateArgs;

pub fn run(a: CalibrateArgs, exec: &Executor) -> Result<()> {
    let methods = parse_methods(std::slice::from_ref(&a.method))?;
    let opts = CalibrationOptions {
        k: a.k,
        sigma2: 1.0,
        bm86_eta: a.bm86_eta,
        bm86_inflation: a.bm86_inflation,
        ln97_permutations: a.permutations,
        ln97_level_decay: a.ln97_level_decay,
        ..CalibrationOptions::default()
    };
    let manifest = RunManifest::start(
        "calibrate",
        Some(a.seed),
        json!({
            "methods": methods,
            "ier": a.ier,
            "reps": a.reps,
            "seed": a.seed,
            "options": opts,
            "out": a.out.display().to_string(),
        }),
    );
    let file = calibrate_all(&methods, a.ier, a.reps, SeedSpec::new(a.seed, 0), &opts, exec)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    file.write(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    let mut side = a.out.clone().into_os_string();
    side.push(".manifest.json");
    manifest.finish(std::path::Path::new(&side))
}
