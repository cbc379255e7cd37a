use super::{MethodConfig, MethodDecision, MethodKind, MethodMeta};
use crate::design::EffectEstimates;
use crate::error::{Error, Result};

/// β̂ⱼ² / TMSE, where TMSE averages the h = ⌊trim·m⌋ smallest squared estimates.
/// Returns the statistics, TMSE and h.
pub fn berk_picard_statistics(values: &[f64], trim_fraction: f64) -> Result<(Vec<f64>, f64, usize)> {
    let m = values.len();
    if m < 3 {
        return Err(Error::Domain(format!("Berk–Picard needs at least 3 effects, got {m}")));
    }
    let h = (trim_fraction * m as f64).floor() as usize;
    if h < 2 || h > m {
        return Err(Error::Config(format!(
            "trim fraction {trim_fraction} leaves {h} of {m} effects in the error term (need at least 2)"
        )));
    }
    let mut sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    sq.sort_by(f64::total_cmp);
    let tmse = sq[..h].iter().sum::<f64>() / h as f64;
    if !(tmse > 0.0) {
        return Err(Error::Degenerate("trimmed mean squared error is zero".into()));
    }
    Ok((values.iter().map(|v| v * v / tmse).collect(), tmse, h))
}

pub fn berk_picard_analyze(est: &EffectEstimates, cfg: &MethodConfig) -> Result<MethodDecision> {
    let (stats, tmse, h) = berk_picard_statistics(&est.values, cfg.bp91.trim_fraction)?;
    let cv = cfg.bp91.critical_value;
    Ok(MethodDecision::from_statistics(
        MethodKind::Bp91,
        stats,
        |s| s > cv,
        MethodMeta::BerkPicard { tmse, trimmed_count: h },
    ))
}
