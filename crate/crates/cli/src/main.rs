use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;

#[derive(Parser, Debug)]
#[command(name = "fscreen", version, about = "Screen location effects in unreplicated 2^k factorials")]
struct Cli {
    /// Worker threads (0 = one per core). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply the screening methods to an experiment CSV.
    Analyze(AnalyzeArgs),
    /// Calibrate method cutoffs to a target individual error rate.
    Calibrate(CalibrateArgs),
    /// Run the simulation study.
    Simulate(SimulateArgs),
    /// Draw charts and the null-model table from simulation output.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Experiment CSV: factor columns A, B, ... and response column y.
    pub experiment: PathBuf,
    /// Calibration file from `calibrate`; calibrated on the fly when absent.
    #[arg(long)]
    pub calib: Option<PathBuf>,
    /// Comma-separated subset of len89,bm86,bp91,ln97.
    #[arg(long, value_delimiter = ',', default_value = "len89,bm86,bp91,ln97")]
    pub methods: Vec<String>,
    /// Seed for LN97 permutations (and for on-the-fly calibration).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// LN97 permutations per step; defaults to the calibration's count.
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Replications for on-the-fly calibration.
    #[arg(long, default_value_t = 1825)]
    pub calib_reps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: commands::analyze::TableFormat,
    /// Write the table here and the JSON sidecar next to it (`<out>.json`);
    /// the table goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// len89, bm86, bp91, ln97 or all.
    #[arg(long, default_value = "all")]
    pub method: String,
    #[arg(long, default_value_t = 0.05)]
    pub ier: f64,
    #[arg(long, default_value_t = 1825)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = factorial_screen::methods::DEFAULT_LN97_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = factorial_screen::methods::DEFAULT_BM86_ETA)]
    pub bm86_eta: f64,
    #[arg(long, default_value_t = factorial_screen::methods::DEFAULT_BM86_INFLATION)]
    pub bm86_inflation: f64,
    #[arg(long, default_value_t = factorial_screen::calibrate::DEFAULT_LN97_LEVEL_DECAY)]
    pub ln97_level_decay: f64,
    /// Calibration JSON to write; its manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// `table1` or a JSON file holding a list of scenarios.
    #[arg(long, default_value = "table1")]
    pub scenarios: String,
    /// Scenario-file Δ values are standard-deviation ratios (squared on load).
    #[arg(long)]
    pub sd_ratio: bool,
    #[arg(long, default_value_t = factorial_screen::simstudy::DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, required_unless_present = "from_manifest")]
    pub seed: Option<u64>,
    #[arg(long, required_unless_present = "from_manifest")]
    pub calib: Option<PathBuf>,
    /// Comma-separated subset of len89,bm86,bp91,ln97.
    #[arg(long, value_delimiter = ',', default_value = "len89,bm86,bp91,ln97")]
    pub methods: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Repeat the run recorded in a simulate manifest; other run flags are ignored.
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Simulation output directory or its summary.csv.
    #[arg(long)]
    pub summary: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = factorial_screen::Executor::new(cli.workers);
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze::run(a, &exec),
        Command::Calibrate(a) => commands::calibrate::run(a, &exec),
        Command::Simulate(a) => commands::simulate::run(a, &exec),
        Command::Report(a) => commands::report::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace(['\n', '\r'], " ");
            eprintln!("fscreen: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
