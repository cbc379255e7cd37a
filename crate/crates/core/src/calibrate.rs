//! Null-simulation calibration of method cutoffs, and EPower effect sizing.
//!
//! LEN89, BP91 and BM86 cutoffs are upper quantiles of the per-effect
//! statistics pooled over all null replications. LN97 cutoffs come from the
//! null distribution of each step's p-value: step s uses its quantile at level
//! γ·s^(−decay), and the single scalar γ is searched so that the step-up
//! procedure hits the target individual error rate.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::datagen::{ResponseSampler, SeedSpec};
use crate::design::{build_design, estimate_effects, FactorialDesign};
use crate::dispersion::ScenarioModel;
use crate::error::{Error, Result};
use crate::methods::{
    berk_picard_statistics, box_meyer_posteriors, lenth_pse, loughin_noble_pvalues, LnPermutations,
    MethodConfig, MethodKind, DEFAULT_BM86_ETA, DEFAULT_BM86_INFLATION, DEFAULT_BP91_TRIM,
    DEFAULT_LN97_PERMUTATIONS,
};
use crate::parallel::Executor;

pub const MIN_CALIBRATION_REPS: usize = 500;
pub const DEFAULT_LN97_LEVEL_DECAY: f64 = 1.25;
// Fewer pooled exceedances than this leaves the quantile too coarse to use.
const MIN_EXCEEDANCES: usize = 10;
const Z_975: f64 = 1.959963984540054;

/// Settings of the null model and the method parameters that are held fixed
/// while cutoffs are calibrated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    pub k: usize,
    pub sigma2: f64,
    pub bp91_trim: f64,
    pub bm86_eta: f64,
    pub bm86_inflation: f64,
    pub ln97_permutations: usize,
    pub ln97_level_decay: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            k: 4,
            sigma2: 1.0,
            bp91_trim: DEFAULT_BP91_TRIM,
            bm86_eta: DEFAULT_BM86_ETA,
            bm86_inflation: DEFAULT_BM86_INFLATION,
            ln97_permutations: DEFAULT_LN97_PERMUTATIONS,
            ln97_level_decay: DEFAULT_LN97_LEVEL_DECAY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CalibratedValue {
    Scalar(f64),
    PerStep(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub method: MethodKind,
    pub target_ier: f64,
    /// Individual error rate of the calibrated rule on the calibration sample.
    pub achieved_ier: f64,
    pub value: CalibratedValue,
    pub n_reps: usize,
    pub seed: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ln97_level: Option<f64>,
}

/// Output of the `calibrate` command; consumed by `simulate` and `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub target_ier: f64,
    pub n_reps: usize,
    pub seed: SeedSpec,
    pub options: CalibrationOptions,
    /// Method configuration with every calibrated value filled in.
    pub config: MethodConfig,
    pub results: Vec<CalibrationResult>,
}

impl CalibrationFile {
    pub fn k(&self) -> usize {
        self.options.k
    }

    pub fn methods(&self) -> Vec<MethodKind> {
        self.results.iter().map(|r| r.method).collect()
    }

    pub fn result(&self, method: MethodKind) -> Option<&CalibrationResult> {
        self.results.iter().find(|r| r.method == method)
    }

    /// Configuration error unless every method in `methods` was calibrated.
    pub fn require(&self, methods: &[MethodKind]) -> Result<()> {
        let missing: Vec<&str> = methods
            .iter()
            .filter(|m| self.result(**m).is_none())
            .map(|m| m.name())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("calibration file has no entry for {}", missing.join(", "))))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let file: CalibrationFile = serde_json::from_str(&text)?;
        file.config.validate(file.k())?;
        Ok(file)
    }
}

fn check_request(target_ier: f64, n_reps: usize, opts: &CalibrationOptions) -> Result<()> {
    if !(target_ier > 0.0 && target_ier < 0.5) {
        return Err(Error::Domain(format!("target IER must lie in (0, 0.5), got {target_ier}")));
    }
    if n_reps < MIN_CALIBRATION_REPS {
        return Err(Error::Config(format!(
            "calibration needs at least {MIN_CALIBRATION_REPS} replications, got {n_reps}"
        )));
    }
    if !(opts.sigma2 > 0.0) {
        return Err(Error::Domain("sigma2 must be positive".into()));
    }
    Ok(())
}

fn null_estimates(
    design: &FactorialDesign,
    opts: &CalibrationOptions,
    n_reps: usize,
    seed: SeedSpec,
    exec: &Executor,
) -> Result<(ResponseSampler, Vec<Vec<f64>>)> {
    let sampler = ResponseSampler::new(design, &ScenarioModel::null(opts.k, opts.sigma2)?)?;
    let values = exec.try_map(n_reps, |r| {
        estimate_effects(design, &sampler.sample(seed.offset(r as u64))).map(|e| e.values)
    })?;
    Ok((sampler, values))
}

/// Per-effect statistics of one method on one set of estimates; larger means
/// more evidence of activity.
fn pooled_statistics(method: MethodKind, values: &[f64], opts: &CalibrationOptions) -> Result<Vec<f64>> {
    match method {
        MethodKind::Len89 => {
            let (_, pse) = lenth_pse(values)?;
            Ok(values.iter().map(|v| v.abs() / pse).collect())
        }
        MethodKind::Bp91 => Ok(berk_picard_statistics(values, opts.bp91_trim)?.0),
        MethodKind::Bm86 => Ok(box_meyer_posteriors(values, opts.bm86_eta, opts.bm86_inflation)?.0),
        MethodKind::Ln97 => Err(Error::Domain("LN97 has no pooled statistic".into())),
    }
}

/// Upper-`target` quantile of `stats`: an effect is active when its statistic
/// strictly exceeds the returned value. Returns (cutoff, fraction above it).
pub fn upper_quantile(stats: &mut [f64], target: f64) -> Result<(f64, f64)> {
    let idx = (target * stats.len() as f64).floor() as usize;
    if idx < MIN_EXCEEDANCES || idx >= stats.len() {
        return Err(Error::Config(format!(
            "{} pooled statistics are too few for an upper {target} quantile",
            stats.len()
        )));
    }
    stats.sort_by(|a, b| b.total_cmp(a));
    let cv = stats[idx];
    let above = stats.partition_point(|&s| s > cv);
    Ok((cv, above as f64 / stats.len() as f64))
}

pub fn calibrate_method(
    method: MethodKind,
    target_ier: f64,
    n_reps: usize,
    seed: SeedSpec,
    opts: &CalibrationOptions,
    exec: &Executor,
) -> Result<CalibrationResult> {
    check_request(target_ier, n_reps, opts)?;
    let design = build_design(opts.k)?;
    if method == MethodKind::Ln97 {
        return calibrate_ln97(&design, target_ier, n_reps, seed, opts, exec);
    }
    let (_, values) = null_estimates(&design, opts, n_reps, seed, exec)?;
    let per_rep = exec.try_map(n_reps, |r| pooled_statistics(method, &values[r], opts))?;
    let mut pooled: Vec<f64> = per_rep.into_iter().flatten().collect();
    let (cv, achieved) = upper_quantile(&mut pooled, target_ier)?;
    Ok(CalibrationResult {
        method,
        target_ier,
        achieved_ier: achieved,
        value: CalibratedValue::Scalar(cv),
        n_reps,
        seed,
        ln97_level: None,
    })
}

/// Null step p-values, one row per replication.
pub fn ln97_null_pvalues(
    design: &FactorialDesign,
    opts: &CalibrationOptions,
    n_reps: usize,
    seed: SeedSpec,
    exec: &Executor,
) -> Result<Vec<Vec<f64>>> {
    let sampler = ResponseSampler::new(design, &ScenarioModel::null(opts.k, opts.sigma2)?)?;
    let steps = design.n() - design.k();
    exec.try_map(n_reps, |r| {
        let s = seed.offset(r as u64);
        let perms = LnPermutations::generate(design.n(), opts.ln97_permutations, s);
        loughin_noble_pvalues(&sampler.sample(s), design, steps, &perms).map(|(p, _)| p)
    })
}

/// Step cutoffs at overall level `gamma`: the null quantile of step s's
/// p-value at level γ·s^(−decay).
pub fn ln97_cutoffs(sorted_by_step: &[Vec<f64>], gamma: f64, decay: f64) -> Vec<f64> {
    sorted_by_step
        .iter()
        .enumerate()
        .map(|(s, col)| {
            let level = gamma * ((s + 1) as f64).powf(-decay);
            let idx = ((level * col.len() as f64).floor() as usize).min(col.len() - 1);
            col[idx]
        })
        .collect()
}

/// IER of the step-up rule on null p-values (every effect is inactive).
pub fn ln97_null_ier(p_values: &[Vec<f64>], cutoffs: &[f64], m: usize) -> f64 {
    let declared: usize = p_values
        .iter()
        .map(|row| crate::methods::deepest_significant(row, cutoffs))
        .sum();
    declared as f64 / (p_values.len() * m) as f64
}

fn calibrate_ln97(
    design: &FactorialDesign,
    target_ier: f64,
    n_reps: usize,
    seed: SeedSpec,
    opts: &CalibrationOptions,
    exec: &Executor,
) -> Result<CalibrationResult> {
    if opts.ln97_permutations < 100 {
        return Err(Error::Config(format!(
            "LN97 needs at least 100 permutations, got {}",
            opts.ln97_permutations
        )));
    }
    if !(opts.ln97_level_decay >= 0.0) {
        return Err(Error::Domain("LN97 level decay must be non-negative".into()));
    }
    if ((target_ier * n_reps as f64).floor() as usize) < MIN_EXCEEDANCES {
        return Err(Error::Config(format!("{n_reps} replications are too few for LN97 at IER {target_ier}")));
    }
    let p = ln97_null_pvalues(design, opts, n_reps, seed, exec)?;
    let steps = p[0].len();
    let sorted: Vec<Vec<f64>> = (0..steps)
        .map(|s| {
            let mut col: Vec<f64> = p.iter().map(|row| row[s]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    let m = design.m();
    let ier = |g: f64| ln97_null_ier(&p, &ln97_cutoffs(&sorted, g, opts.ln97_level_decay), m);

    // IER is a non-decreasing step function of γ; bisect to the jump nearest
    // the target and keep whichever side lands closer.
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut ier_lo, mut ier_hi) = (ier(lo), ier(hi));
    if ier_hi < target_ier {
        return Err(Error::Config("LN97 cannot reach the target IER".into()));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let v = ier(mid);
        if v < target_ier {
            lo = mid;
            ier_lo = v;
        } else {
            hi = mid;
            ier_hi = v;
        }
    }
    let (gamma, achieved) = if (target_ier - ier_lo) < (ier_hi - target_ier) {
        (lo, ier_lo)
    } else {
        (hi, ier_hi)
    };
    Ok(CalibrationResult {
        method: MethodKind::Ln97,
        target_ier,
        achieved_ier: achieved,
        value: CalibratedValue::PerStep(ln97_cutoffs(&sorted, gamma, opts.ln97_level_decay)),
        n_reps,
        seed,
        ln97_level: Some(gamma),
    })
}

/// Calibrates each method in `methods` and assembles the configuration.
pub fn calibrate_all(
    methods: &[MethodKind],
    target_ier: f64,
    n_reps: usize,
    seed: SeedSpec,
    opts: &CalibrationOptions,
    exec: &Executor,
) -> Result<CalibrationFile> {
    let mut config = MethodConfig::defaults(opts.k)?;
    config.bp91.trim_fraction = opts.bp91_trim;
    config.bm86.eta = opts.bm86_eta;
    config.bm86.inflation = opts.bm86_inflation;
    config.ln97.n_permutations = opts.ln97_permutations;
    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let r = calibrate_method(method, target_ier, n_reps, seed, opts, exec)?;
        apply(&mut config, &r);
        results.push(r);
    }
    config.validate(opts.k)?;
    Ok(CalibrationFile { target_ier, n_reps, seed, options: opts.clone(), config, results })
}

pub fn apply(config: &mut MethodConfig, r: &CalibrationResult) {
    match (&r.value, r.method) {
        (CalibratedValue::Scalar(v), MethodKind::Len89) => config.len89.critical_value = *v,
        (CalibratedValue::Scalar(v), MethodKind::Bp91) => config.bp91.critical_value = *v,
        (CalibratedValue::Scalar(v), MethodKind::Bm86) => config.bm86.threshold = *v,
        (CalibratedValue::PerStep(v), MethodKind::Ln97) => {
            config.ln97.critical_values = v.clone();
            config.ln97.max_steps = v.len();
        }
        _ => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EPowerLevel {
    Small,
    Medium,
    Large,
}

impl EPowerLevel {
    pub const ALL: [EPowerLevel; 3] = [EPowerLevel::Small, EPowerLevel::Medium, EPowerLevel::Large];

    pub fn target(self) -> f64 {
        match self {
            EPowerLevel::Small => 0.2,
            EPowerLevel::Medium => 0.5,
            EPowerLevel::Large => 0.9,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EPowerLevel::Small => "small",
            EPowerLevel::Medium => "medium",
            EPowerLevel::Large => "large",
        }
    }
}

impl std::fmt::Display for EPowerLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for EPowerLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(EPowerLevel::Small),
            "medium" => Ok(EPowerLevel::Medium),
            "large" => Ok(EPowerLevel::Large),
            _ => Err(Error::Parse(format!("unknown EPower level '{s}'"))),
        }
    }
}

/// Power of the two-sided 5% σ-known Z test at standardized effect `delta`.
pub fn z_test_power(delta: f64) -> f64 {
    let n = Normal::standard();
    1.0 - n.cdf(Z_975 - delta) + n.cdf(-Z_975 - delta)
}

/// Standardized effect giving Z-test power `target`, by bisection on [0, 10].
pub fn epower_delta(target: f64) -> Result<f64> {
    let floor = z_test_power(0.0);
    if !(target >= floor && target < 1.0) {
        return Err(Error::Domain(format!("EPower target must lie in [{floor:.4}, 1), got {target}")));
    }
    let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if z_test_power(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// |β| whose estimate, with standard deviation `effect_sd`, is detected by the
/// σ-known Z test with the level's probability.
pub fn epower_effect_size(level: EPowerLevel, effect_sd: f64) -> Result<f64> {
    if !(effect_sd > 0.0 && effect_sd.is_finite()) {
        return Err(Error::Domain(format!("effect sd must be positive, got {effect_sd}")));
    }
    Ok(epower_delta(level.target())? * effect_sd)
}
