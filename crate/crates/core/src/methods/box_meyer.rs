//! Box–Meyer posterior activity probabilities.
//!
//! Contrasts are modelled as β̂ⱼ ~ N(0, cⱼσ²/n) with cⱼ = 1 for inert and
//! cⱼ = c for active effects, activity independent Bernoulli(η), and
//! p(σ) ∝ 1/σ. Integrating σ out gives a pattern weight proportional to
//! η^|a| (1−η)^(m−|a|) c^(−|a|/2) (Σⱼ β̂ⱼ²/cⱼ)^(−m/2), which is summed exactly
//! over all 2^m patterns for m ≤ 20. Larger designs integrate over log σ
//! numerically instead; both compute the same marginal posterior.

use super::{MethodConfig, MethodDecision, MethodKind, MethodMeta};
use crate::design::EffectEstimates;
use crate::error::{Error, Result};

pub const MAX_ENUMERATED_EFFECTS: usize = 20;

pub fn box_meyer_posteriors(values: &[f64], eta: f64, inflation: f64) -> Result<(Vec<f64>, bool)> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Domain(format!("Box–Meyer needs at least 2 effects, got {m}")));
    }
    if !(eta > 0.0 && eta < 1.0) || !(inflation >= 1.0) {
        return Err(Error::Config(format!("invalid prior: eta={eta}, inflation={inflation}")));
    }
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    if sq.iter().all(|&s| s == 0.0) {
        return Err(Error::Degenerate("all effect estimates are zero".into()));
    }
    if m <= MAX_ENUMERATED_EFFECTS {
        Ok((enumerate(&sq, eta, inflation), true))
    } else {
        Ok((integrate(&sq, eta, inflation), false))
    }
}

fn enumerate(sq: &[f64], eta: f64, c: f64) -> Vec<f64> {
    let m = sq.len();
    let patterns = 1usize << m;
    let total: f64 = sq.iter().sum();
    let shrink = 1.0 - 1.0 / c;
    // Σ over active effects of β̂², built one lowest bit at a time.
    let mut active_sq = vec![0.0f64; patterns];
    for a in 1..patterns {
        let low = a.trailing_zeros() as usize;
        active_sq[a] = active_sq[a & (a - 1)] + sq[low];
    }
    let per_active = eta.ln() - (1.0 - eta).ln() - 0.5 * c.ln();
    let half_m = 0.5 * m as f64;
    let mut log_w = active_sq;
    let mut max = f64::NEG_INFINITY;
    for (a, lw) in log_w.iter_mut().enumerate() {
        let s = total - shrink * *lw;
        *lw = a.count_ones() as f64 * per_active - half_m * s.ln();
        max = max.max(*lw);
    }
    let mut norm = 0.0;
    let mut marg = vec![0.0; m];
    for (a, &lw) in log_w.iter().enumerate() {
        let w = (lw - max).exp();
        norm += w;
        let mut bits = a;
        while bits != 0 {
            marg[bits.trailing_zeros() as usize] += w;
            bits &= bits - 1;
        }
    }
    marg.iter().map(|x| x / norm).collect()
}

/// Trapezoid rule over log σ of the σ-conditional posteriors, weighted by the
/// marginal density of σ.
fn integrate(sq: &[f64], eta: f64, c: f64) -> Vec<f64> {
    const POINTS: usize = 20_000;
    let m = sq.len();
    let positive = sq.iter().copied().filter(|&s| s > 0.0);
    let lo = positive.clone().fold(f64::INFINITY, f64::min);
    let hi = positive.fold(0.0, f64::max);
    // v = σ²/n over a range that covers the posterior mass with room to spare
    let (a, b) = ((lo / (1e4 * c)).ln(), (hi * 1e4).ln());
    let step = (b - a) / (POINTS - 1) as f64;
    let mut log_dens = Vec::with_capacity(POINTS);
    let mut cond = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let v = (a + step * i as f64).exp();
        let mut ld = 0.0;
        let mut p = Vec::with_capacity(m);
        for &s in sq {
            let l0 = (1.0 - eta).ln() - 0.5 * v.ln() - s / (2.0 * v);
            let l1 = eta.ln() - 0.5 * (c * v).ln() - s / (2.0 * c * v);
            let mx = l0.max(l1);
            let lse = mx + ((l0 - mx).exp() + (l1 - mx).exp()).ln();
            ld += lse;
            p.push((l1 - lse).exp());
        }
        log_dens.push(ld);
        cond.push(p);
    }
    let max = log_dens.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut norm = 0.0;
    let mut out = vec![0.0; m];
    for i in 0..POINTS {
        let w = (log_dens[i] - max).exp() * if i == 0 || i == POINTS - 1 { 0.5 } else { 1.0 };
        norm += w;
        for (o, p) in out.iter_mut().zip(&cond[i]) {
            *o += w * p;
        }
    }
    out.iter().map(|x| x / norm).collect()
}

pub fn box_meyer_analyze(est: &EffectEstimates, cfg: &MethodConfig) -> Result<MethodDecision> {
    let b = &cfg.bm86;
    let (post, enumerated) = box_meyer_posteriors(&est.values, b.eta, b.inflation)?;
    let threshold = b.threshold;
    Ok(MethodDecision::from_statistics(
        MethodKind::Bm86,
        post.clone(),
        |p| p > threshold,
        MethodMeta::BoxMeyer { posteriors: post, enumerated },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_inflation_returns_prior() {
        let v = [0.3, -1.2, 4.0, 0.01, 2.2];
        let (p, _) = box_meyer_posteriors(&v, 0.2, 1.0).unwrap();
        assert!(p.iter().all(|&x| (x - 0.2).abs() < 1e-12));
    }

    #[test]
    fn vanishing_prior_gives_vanishing_posterior() {
        let v = [0.3, -1.2, 4.0, 0.01, 2.2, 0.5, -0.4];
        let (p, _) = box_meyer_posteriors(&v, 1e-9, 100.0).unwrap();
        assert!(p.iter().all(|&x| x < 1e-6));
    }

    #[test]
    fn three_effect_case_against_hand_enumeration() {
        let v = [5.0, 0.1, -0.1];
        let (eta, c) = (0.2f64, 10.0f64);
        let (p, _) = box_meyer_posteriors(&v, eta, c).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for a in 0..8u32 {
            let k = a.count_ones() as i32;
            let s: f64 = (0..3)
                .map(|j| v[j] * v[j] / if a & (1 << j) != 0 { c } else { 1.0 })
                .sum();
            let w = eta.powi(k) * (1.0 - eta).powi(3 - k) * c.powf(-0.5 * k as f64) * s.powf(-1.5);
            den += w;
            if a & 1 != 0 {
                num += w;
            }
        }
        assert!((p[0] - num / den).abs() < 1e-12);
        assert!(p[0] > 0.5 && p[1] < p[0]);
    }

    #[test]
    fn quadrature_agrees_with_enumeration() {
        let v: Vec<f64> = (0..15).map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.3 + if i == 4 { 6.0 } else { 0.0 }).collect();
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let e = enumerate(&sq, 0.2, 100.0);
        let q = integrate(&sq, 0.2, 100.0);
        for (a, b) in e.iter().zip(&q) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn all_zero_is_degenerate() {
        assert!(matches!(box_meyer_posteriors(&[0.0; 7], 0.2, 10.0), Err(Error::Degenerate(_))));
    }
}
