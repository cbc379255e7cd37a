use anyhow::{Context, Result};
use serde_json::json;

use crate::manifest::{RunManifest, MANIFEST_NAME};
use crate::ReportArgs;

pub fn run(a: ReportArgs) -> Result<()> {
    let summary = if a.summary.is_dir() { a.summary.join("summary.csv") } else { a.summary.clone() };
    let mut manifest = RunManifest::start(
        "report",
        None,
        json!({ "summary": summary.display().to_string(), "out": a.out.display().to_string() }),
    );
    manifest.add_input(&summary)?;
    let hist = summary.with_file_name("histogram.csv");
    if hist.exists() {
        manifest.add_input(&hist)?;
    }
    let written = factorial_screen::report::write_report(&summary, &a.out)
        .with_context(|| format!("reporting on {}", summary.display()))?;
    if written.is_empty() {
        anyhow::bail!("{} holds no rows to plot", summary.display());
    }
    manifest.finish(&a.out.join(MANIFEST_NAME))
}
