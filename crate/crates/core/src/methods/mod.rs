//! The four location-effect identification methods.

mod berk_picard;
mod box_meyer;
mod lenth;
mod loughin_noble;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datagen::SeedSpec;
use crate::design::{EffectEstimates, EffectId, FactorialDesign};
use crate::error::{Error, Result};

pub use berk_picard::{berk_picard_analyze, berk_picard_statistics};
pub use box_meyer::{box_meyer_analyze, box_meyer_posteriors, MAX_ENUMERATED_EFFECTS};
pub use lenth::{lenth_analyze, lenth_pse, lenth_reference_critical_value, lenth_t_pvalues};
pub use loughin_noble::{loughin_noble_analyze, loughin_noble_pvalues, LnPermutations};
pub(crate) use loughin_noble::deepest_significant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Len89,
    Bm86,
    Bp91,
    Ln97,
}

impl MethodKind {
    /// Table order.
    pub const ALL: [MethodKind; 4] = [MethodKind::Len89, MethodKind::Bm86, MethodKind::Bp91, MethodKind::Ln97];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Len89 => "LEN89",
            MethodKind::Bm86 => "BM86",
            MethodKind::Bp91 => "BP91",
            MethodKind::Ln97 => "LN97",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            MethodKind::Len89 => "len89",
            MethodKind::Bm86 => "bm86",
            MethodKind::Bp91 => "bp91",
            MethodKind::Ln97 => "ln97",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "len89" | "lenth" => Ok(MethodKind::Len89),
            "bm86" | "box-meyer" => Ok(MethodKind::Bm86),
            "bp91" | "berk-picard" => Ok(MethodKind::Bp91),
            "ln97" | "loughin-noble" => Ok(MethodKind::Ln97),
            _ => Err(Error::Parse(format!("unknown method '{s}' (expected len89, bm86, bp91 or ln97)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectDecision {
    pub effect: EffectId,
    pub statistic: f64,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodMeta {
    Lenth { initial_scale: f64, pse: f64 },
    BerkPicard { tmse: f64, trimmed_count: usize },
    BoxMeyer { posteriors: Vec<f64>, enumerated: bool },
    LoughinNoble { p_values: Vec<f64>, tested: Vec<EffectId>, deepest_significant: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodDecision {
    pub method: MethodKind,
    /// One entry per non-intercept effect, Yates order.
    pub per_effect: Vec<EffectDecision>,
    pub meta: MethodMeta,
}

impl MethodDecision {
    pub fn active_effects(&self) -> Vec<EffectId> {
        self.per_effect.iter().filter(|d| d.active).map(|d| d.effect).collect()
    }

    pub fn is_active(&self, e: EffectId) -> bool {
        self.per_effect[e.index() - 1].active
    }

    /// Active flags indexed like `EffectEstimates::values`.
    pub fn active_flags(&self) -> Vec<bool> {
        self.per_effect.iter().map(|d| d.active).collect()
    }

    pub(crate) fn from_statistics(
        method: MethodKind,
        stats: Vec<f64>,
        active: impl Fn(f64) -> bool,
        meta: MethodMeta,
    ) -> Self {
        let per_effect = stats
            .into_iter()
            .enumerate()
            .map(|(i, s)| EffectDecision {
                effect: EffectId::new_unchecked(i + 1),
                statistic: s,
                active: active(s),
            })
            .collect();
        MethodDecision { method, per_effect, meta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LenthConfig {
    pub critical_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerkPicardConfig {
    pub trim_fraction: f64,
    pub critical_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxMeyerConfig {
    /// Prior probability that an effect is active.
    pub eta: f64,
    /// Variance inflation of active contrasts, c = 1 + nτ²/σ².
    pub inflation: f64,
    /// Posterior cutoff.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoughinNobleConfig {
    pub n_permutations: usize,
    /// Cutoff for the p-value at step s is `critical_values[s - 1]`.
    pub critical_values: Vec<f64>,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub len89: LenthConfig,
    pub bp91: BerkPicardConfig,
    pub bm86: BoxMeyerConfig,
    pub ln97: LoughinNobleConfig,
}

pub const DEFAULT_BP91_TRIM: f64 = 0.60;
pub const DEFAULT_BM86_ETA: f64 = 0.2;
pub const DEFAULT_BM86_INFLATION: f64 = 100.0;
pub const DEFAULT_LN97_PERMUTATIONS: usize = 1000;

impl MethodConfig {
    /// Uncalibrated starting values for a 2^k design: Lenth's t_{m/3} cutoff,
    /// the F(1, h) 95% point for BP91, Box–Meyer's 0.5 posterior rule and a
    /// flat 0.05 cutoff at every LN97 step. Use `calibrate` before relying on
    /// error rates.
    pub fn defaults(k: usize) -> Result<Self> {
        let n = 1usize << k;
        crate::design::build_design(k)?;
        let m = n - 1;
        let h = (DEFAULT_BP91_TRIM * m as f64).floor();
        let f = statrs::distribution::FisherSnedecor::new(1.0, h)
            .map_err(|e| Error::Domain(e.to_string()))?;
        let max_steps = n - k;
        Ok(MethodConfig {
            len89: LenthConfig { critical_value: lenth_reference_critical_value(m, 0.05)? },
            bp91: BerkPicardConfig {
                trim_fraction: DEFAULT_BP91_TRIM,
                critical_value: statrs::distribution::ContinuousCDF::inverse_cdf(&f, 0.95),
            },
            bm86: BoxMeyerConfig {
                eta: DEFAULT_BM86_ETA,
                inflation: DEFAULT_BM86_INFLATION,
                threshold: 0.5,
            },
            ln97: LoughinNobleConfig {
                n_permutations: DEFAULT_LN97_PERMUTATIONS,
                critical_values: vec![0.05; max_steps],
                max_steps,
            },
        })
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        let n = 1usize << k;
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.len89.critical_value > 0.0) {
            return bad("len89 critical value must be positive".into());
        }
        if !(self.bp91.trim_fraction > 0.0 && self.bp91.trim_fraction < 1.0) {
            return bad("bp91 trim fraction must lie in (0, 1)".into());
        }
        if !(self.bp91.critical_value > 0.0) {
            return bad("bp91 critical value must be positive".into());
        }
        let b = &self.bm86;
        if !(b.eta > 0.0 && b.eta < 1.0) || !(b.threshold > 0.0 && b.threshold < 1.0) {
            return bad("bm86 eta and threshold must lie in (0, 1)".into());
        }
        if !(b.inflation >= 1.0) {
            return bad("bm86 inflation must be at least 1".into());
        }
        let l = &self.ln97;
        if l.max_steps == 0 || l.max_steps > n - k {
            return bad(format!("ln97 max_steps must be in 1..={} for k={k}", n - k));
        }
        if l.critical_values.len() < l.max_steps {
            return bad(format!(
                "ln97 needs {} critical values, got {}",
                l.max_steps,
                l.critical_values.len()
            ));
        }
        if l.n_permutations < 100 {
            return bad(format!("ln97 needs at least 100 permutations, got {}", l.n_permutations));
        }
        Ok(())
    }
}

/// Runs the requested methods on one experiment. LN97 draws its permutations
/// from `seed`. A response without contrast variation (every estimate zero up
/// to round-off) yields no active effects instead of a degenerate-scale error.
pub fn analyze_all(
    design: &FactorialDesign,
    y: &[f64],
    est: &EffectEstimates,
    cfg: &MethodConfig,
    methods: &[MethodKind],
    seed: SeedSpec,
) -> Result<Vec<MethodDecision>> {
    let scale = y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let flat = est.values.iter().all(|v| v.abs() <= 64.0 * f64::EPSILON * scale);
    methods
        .iter()
        .map(|&m| match m {
            _ if flat => Ok(flat_decision(m, est.m(), cfg)),
            MethodKind::Len89 => lenth_analyze(est, cfg),
            MethodKind::Bp91 => berk_picard_analyze(est, cfg),
            MethodKind::Bm86 => box_meyer_analyze(est, cfg),
            MethodKind::Ln97 => loughin_noble_analyze(y, design, cfg, seed),
        })
        .collect()
}

fn flat_decision(method: MethodKind, m: usize, cfg: &MethodConfig) -> MethodDecision {
    let (stat, meta) = match method {
        MethodKind::Len89 => (0.0, MethodMeta::Lenth { initial_scale: 0.0, pse: 0.0 }),
        MethodKind::Bp91 => (
            0.0,
            MethodMeta::BerkPicard { tmse: 0.0, trimmed_count: (cfg.bp91.trim_fraction * m as f64).floor() as usize },
        ),
        MethodKind::Bm86 => (0.0, MethodMeta::BoxMeyer { posteriors: vec![0.0; m], enumerated: true }),
        MethodKind::Ln97 => (
            1.0,
            MethodMeta::LoughinNoble {
                p_values: vec![1.0; cfg.ln97.max_steps],
                tested: (1..=cfg.ln97.max_steps).map(EffectId::new_unchecked).collect(),
                deepest_significant: 0,
            },
        ),
    };
    MethodDecision::from_statistics(method, vec![stat; m], |_| false, meta)
}

pub(crate) fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}
