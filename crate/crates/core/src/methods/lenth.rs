use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{median, MethodConfig, MethodDecision, MethodKind, MethodMeta};
use crate::design::EffectEstimates;
use crate::error::{Error, Result};

/// Returns (s₀, PSE). Trimming is a single pass at 3.75 × the initial median
/// magnitude (2.5 s₀); PSE is 1.5 × the median of what remains.
pub fn lenth_pse(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 3 {
        return Err(Error::Domain(format!("Lenth's method needs at least 3 effects, got {}", values.len())));
    }
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let med = median(&abs);
    let s0 = 1.5 * med;
    let cut = 3.75 * med;
    let kept = abs.partition_point(|&a| a < cut);
    if kept == 0 {
        return Err(Error::Degenerate("pseudo standard error is zero".into()));
    }
    let pse = 1.5 * median(&abs[..kept]);
    if !(pse > 0.0) {
        return Err(Error::Degenerate("pseudo standard error is zero".into()));
    }
    Ok((s0, pse))
}

pub fn lenth_analyze(est: &EffectEstimates, cfg: &MethodConfig) -> Result<MethodDecision> {
    let (s0, pse) = lenth_pse(&est.values)?;
    let cv = cfg.len89.critical_value;
    let stats = est.values.iter().map(|v| v.abs() / pse).collect();
    Ok(MethodDecision::from_statistics(
        MethodKind::Len89,
        stats,
        |t| t > cv,
        MethodMeta::Lenth { initial_scale: s0, pse },
    ))
}

/// Two-sided p-values against Lenth's t reference with m/3 degrees of freedom.
/// Not used by the simulation path, which relies on calibrated cutoffs.
pub fn lenth_t_pvalues(est: &EffectEstimates) -> Result<Vec<f64>> {
    let (_, pse) = lenth_pse(&est.values)?;
    let t = reference(est.values.len())?;
    Ok(est.values.iter().map(|v| 2.0 * (1.0 - t.cdf(v.abs() / pse))).collect())
}

/// Two-sided level-`alpha` cutoff of the t_{m/3} reference.
pub fn lenth_reference_critical_value(m: usize, alpha: f64) -> Result<f64> {
    Ok(reference(m)?.inverse_cdf(1.0 - alpha / 2.0))
}

fn reference(m: usize) -> Result<StudentsT> {
    StudentsT::new(0.0, 1.0, m as f64 / 3.0).map_err(|e| Error::Domain(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::MethodConfig;

    fn est(values: Vec<f64>) -> EffectEstimates {
        EffectEstimates { design_k: 4, intercept: 0.0, values }
    }

    #[test]
    fn equal_magnitudes() {
        let cfg = MethodConfig::defaults(4).unwrap();
        let e = est((0..15).map(|i| if i % 2 == 0 { 0.7 } else { -0.7 }).collect());
        let (_, pse) = lenth_pse(&e.values).unwrap();
        assert!((pse - 1.05).abs() < 1e-12);
        let d = lenth_analyze(&e, &cfg).unwrap();
        for x in &d.per_effect {
            assert!((x.statistic - 1.0 / 1.5).abs() < 1e-12);
            assert!(!x.active);
        }
    }

    #[test]
    fn one_outlier_is_trimmed() {
        let mut v = vec![1.0; 15];
        v[6] = 10.0;
        let (s0, pse) = lenth_pse(&v).unwrap();
        assert_eq!(s0, 1.5);
        assert_eq!(pse, 1.5);
        let mut cfg = MethodConfig::defaults(4).unwrap();
        cfg.len89.critical_value = 2.0;
        let d = lenth_analyze(&est(v), &cfg).unwrap();
        assert!((d.per_effect[6].statistic - 10.0 / 1.5).abs() < 1e-12);
        assert_eq!(d.active_effects().len(), 1);
    }

    #[test]
    fn all_zero_is_degenerate() {
        assert!(matches!(lenth_pse(&[0.0; 15]), Err(Error::Degenerate(_))));
        assert!(matches!(lenth_pse(&[1.0, 2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn t_pvalues_are_probabilities() {
        let e = est((1..=15).map(|i| i as f64 * 0.1).collect());
        let p = lenth_t_pvalues(&e).unwrap();
        assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(p[14] < p[0]);
    }
}
