//! Loughin–Noble step-up permutation test.
//!
//! Step s tests the s-th largest |β̂|: residuals from the model holding the
//! intercept and the s − 1 larger effects are permuted, every effect is
//! re-estimated, and the largest magnitude among the effects not yet in the
//! model is compared with the observed one. One set of random permutations is
//! drawn per call and shared by all steps.

use rand::seq::SliceRandom;

use super::{MethodConfig, MethodDecision, MethodKind, MethodMeta};
use crate::datagen::{SeedSpec, StreamPurpose};
use crate::design::{analyze_contrasts, analyze_contrasts_in_place, synthesize, EffectId, FactorialDesign};
use crate::error::{Error, Result};

// Relative slack when comparing a permuted maximum with the observed value, so
// that transform round-off cannot break exact ties.
const TIE_TOLERANCE: f64 = 1e-9;

/// Random run permutations, stored flat.
#[derive(Clone, Debug)]
pub struct LnPermutations {
    n: usize,
    flat: Vec<u16>,
}

impl LnPermutations {
    pub fn generate(n: usize, count: usize, seed: SeedSpec) -> Self {
        let mut rng = seed.rng(StreamPurpose::Permutation);
        let mut flat = Vec::with_capacity(n * count);
        let mut perm: Vec<u16> = (0..n as u16).collect();
        for _ in 0..count {
            perm.shuffle(&mut rng);
            flat.extend_from_slice(&perm);
        }
        LnPermutations { n, flat }
    }

    /// Every permutation of `0..n`, in lexicographic order. Only sensible for tiny n.
    pub fn exhaustive(n: usize) -> Self {
        let mut perm: Vec<u16> = (0..n as u16).collect();
        let mut flat = perm.clone();
        while next_permutation(&mut perm) {
            flat.extend_from_slice(&perm);
        }
        LnPermutations { n, flat }
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.flat.chunks_exact(self.n)
    }
}

fn next_permutation(p: &mut [u16]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Step p-values and the effects tested at each step (in order).
///
/// The p-value is (1 + #{permutations with max ≥ observed}) / (1 + #permutations).
pub fn loughin_noble_pvalues(
    y: &[f64],
    design: &FactorialDesign,
    max_steps: usize,
    perms: &LnPermutations,
) -> Result<(Vec<f64>, Vec<EffectId>)> {
    let n = design.n();
    if y.len() != n {
        return Err(Error::Domain(format!("response length {} does not match n={n}", y.len())));
    }
    if perms.n != n {
        return Err(Error::Domain("permutation length does not match the design".into()));
    }
    if max_steps > n - design.k() {
        return Err(Error::Config(format!(
            "at most n - k = {} steps can be tested, got {max_steps}",
            n - design.k()
        )));
    }
    let b = analyze_contrasts(y);
    let mut order: Vec<usize> = (1..n).collect();
    order.sort_by(|&a, &c| b[c].abs().total_cmp(&b[a].abs()).then(a.cmp(&c)));

    let mut coef = b.clone();
    coef[0] = 0.0;
    let mut remaining: Vec<usize> = (1..n).collect();
    let mut buf = vec![0.0; n];
    let denom = (perms.len() + 1) as f64;
    let mut p_values = Vec::with_capacity(max_steps);
    for s in 0..max_steps {
        if s > 0 {
            let fitted = order[s - 1];
            coef[fitted] = 0.0;
            remaining.retain(|&j| j != fitted);
        }
        let resid = synthesize(&coef);
        let observed = b[order[s]].abs() * (1.0 - TIE_TOLERANCE);
        let mut count = 0usize;
        for perm in perms.iter() {
            for (dst, &src) in buf.iter_mut().zip(perm) {
                *dst = resid[src as usize];
            }
            analyze_contrasts_in_place(&mut buf);
            if remaining.iter().any(|&j| buf[j].abs() >= observed) {
                count += 1;
            }
        }
        p_values.push((1 + count) as f64 / denom);
    }
    let tested = order[..max_steps].iter().map(|&j| EffectId::new_unchecked(j)).collect();
    Ok((p_values, tested))
}

/// Deepest step whose p-value falls below its cutoff (0 when none does).
pub(crate) fn deepest_significant(p_values: &[f64], critical_values: &[f64]) -> usize {
    p_values
        .iter()
        .zip(critical_values)
        .rposition(|(p, c)| p < c)
        .map_or(0, |s| s + 1)
}

pub fn loughin_noble_analyze(
    y: &[f64],
    design: &FactorialDesign,
    cfg: &MethodConfig,
    seed: SeedSpec,
) -> Result<MethodDecision> {
    let c = &cfg.ln97;
    if c.n_permutations < 100 {
        return Err(Error::Config(format!(
            "LN97 needs at least 100 permutations for usable p-value resolution, got {}",
            c.n_permutations
        )));
    }
    if c.critical_values.len() < c.max_steps {
        return Err(Error::Config(format!(
            "LN97 needs {} critical values, got {}",
            c.max_steps,
            c.critical_values.len()
        )));
    }
    let perms = LnPermutations::generate(design.n(), c.n_permutations, seed);
    let (p_values, tested) = loughin_noble_pvalues(y, design, c.max_steps, &perms)?;
    Ok(decide(design.m(), p_values, tested, &c.critical_values))
}

pub(crate) fn decide(
    m: usize,
    p_values: Vec<f64>,
    tested: Vec<EffectId>,
    critical_values: &[f64],
) -> MethodDecision {
    let deepest = deepest_significant(&p_values, critical_values);
    let mut stats = vec![1.0; m];
    let mut active = vec![false; m];
    for (s, (e, &p)) in tested.iter().zip(&p_values).enumerate() {
        stats[e.index() - 1] = p;
        active[e.index() - 1] = s < deepest;
    }
    let mut d = MethodDecision::from_statistics(
        MethodKind::Ln97,
        stats,
        |_| false,
        MethodMeta::LoughinNoble { p_values, tested, deepest_significant: deepest },
    );
    for (x, a) in d.per_effect.iter_mut().zip(active) {
        x.active = a;
    }
    d
}
