use factorial_screen::calibrate::{epower_effect_size, upper_quantile, EPowerLevel};
use factorial_screen::design::{build_design, estimate_effects, interaction_product, EffectEstimates, EffectId};
use factorial_screen::dispersion::induced_delta;
use factorial_screen::methods::{
    berk_picard_analyze, box_meyer_analyze, lenth_analyze, MethodConfig, MethodDecision,
};
use factorial_screen::simstudy::{metrics_from_flags, Scenario, SignedEffect};
use factorial_screen::MethodKind;
use proptest::prelude::*;

fn estimates(values: Vec<f64>) -> EffectEstimates {
    EffectEstimates { design_k: 4, intercept: 0.0, values }
}

fn contrasts() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 15).prop_filter("needs spread", |v| {
        let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        a.sort_by(f64::total_cmp);
        a[7] > 1e-3
    })
}

fn analyze(kind: MethodKind, est: &EffectEstimates, cfg: &MethodConfig) -> MethodDecision {
    match kind {
        MethodKind::Len89 => lenth_analyze(est, cfg),
        MethodKind::Bp91 => berk_picard_analyze(est, cfg),
        MethodKind::Bm86 => box_meyer_analyze(est, cfg),
        MethodKind::Ln97 => unreachable!(),
    }
    .unwrap()
}

const SCALE_FREE: [MethodKind; 3] = [MethodKind::Len89, MethodKind::Bp91, MethodKind::Bm86];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn estimates_invert_the_model(k in 2usize..=6, seed in prop::collection::vec(-5.0f64..5.0, 64)) {
        let d = build_design(k).unwrap();
        let beta: Vec<f64> = seed[..d.n()].to_vec();
        let y = d.fitted(&beta);
        let est = estimate_effects(&d, &y).unwrap();
        for (a, b) in est.full().iter().zip(&beta) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn products_follow_column_algebra(k in 2usize..=6, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
        let n = 1usize << k;
        let (a, b, c) = (EffectId::new(a % n, k).unwrap(), EffectId::new(b % n, k).unwrap(), EffectId::new(c % n, k).unwrap());
        let d = build_design(k).unwrap();
        let ab = interaction_product(a, b, k).unwrap();
        let (ca, cb, cab) = (d.column(a), d.column(b), d.column(ab));
        for i in 0..n {
            prop_assert_eq!(ca[i] * cb[i], cab[i]);
        }
        prop_assert_eq!(ab, interaction_product(b, a, k).unwrap());
        prop_assert!(interaction_product(a, a, k).unwrap().is_intercept());
        let left = interaction_product(ab, c, k).unwrap();
        let right = interaction_product(a, interaction_product(b, c, k).unwrap(), k).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn decisions_are_scale_equivariant(v in contrasts(), scale in 1e-3f64..1e3, flip in any::<bool>()) {
        let cfg = MethodConfig::defaults(4).unwrap();
        let s = if flip { -scale } else { scale };
        let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
        for kind in SCALE_FREE {
            let a = analyze(kind, &estimates(v.clone()), &cfg);
            let b = analyze(kind, &estimates(scaled.clone()), &cfg);
            for (x, y) in a.per_effect.iter().zip(&b.per_effect) {
                prop_assert!((x.statistic - y.statistic).abs() <= 1e-9 * x.statistic.abs().max(1.0));
            }
            // statistics can only change by round-off; compare decisions away from the cutoff
            let cut = match kind {
                MethodKind::Len89 => cfg.len89.critical_value,
                MethodKind::Bp91 => cfg.bp91.critical_value,
                _ => cfg.bm86.threshold,
            };
            for (x, y) in a.per_effect.iter().zip(&b.per_effect) {
                if (x.statistic - cut).abs() > 1e-6 * cut {
                    prop_assert_eq!(x.active, y.active);
                }
            }
        }
    }

    #[test]
    fn decisions_follow_relabeling(v in contrasts(), perm in Just((0..15).collect::<Vec<usize>>()).prop_shuffle()) {
        let cfg = MethodConfig::defaults(4).unwrap();
        let permuted: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
        for kind in SCALE_FREE {
            let a = analyze(kind, &estimates(v.clone()), &cfg);
            let b = analyze(kind, &estimates(permuted.clone()), &cfg);
            for (j, &i) in perm.iter().enumerate() {
                prop_assert_eq!(b.per_effect[j].active, a.per_effect[i].active);
                prop_assert!((b.per_effect[j].statistic - a.per_effect[i].statistic).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn larger_cutoffs_shrink_active_sets(v in contrasts(), lo in 0.0f64..1.0, gap in 0.0f64..1.0) {
        let mut c1 = MethodConfig::defaults(4).unwrap();
        let mut c2 = c1.clone();
        c1.len89.critical_value = 1.0 + 3.0 * lo;
        c2.len89.critical_value = 1.0 + 3.0 * (lo + gap);
        c1.bp91.critical_value = 1.0 + 30.0 * lo;
        c2.bp91.critical_value = 1.0 + 30.0 * (lo + gap);
        c1.bm86.threshold = 0.01 + 0.49 * lo;
        c2.bm86.threshold = 0.01 + 0.49 * (lo + gap);
        for kind in SCALE_FREE {
            let a = analyze(kind, &estimates(v.clone()), &c1);
            let b = analyze(kind, &estimates(v.clone()), &c2);
            for (x, y) in a.per_effect.iter().zip(&b.per_effect) {
                prop_assert!(!y.active || x.active);
            }
        }
    }

    #[test]
    fn upper_quantile_is_monotone(v in prop::collection::vec(0.0f64..100.0, 1000), t1 in 0.02f64..0.45, t2 in 0.02f64..0.45) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let (c_lo, f_lo) = upper_quantile(&mut v.clone(), lo).unwrap();
        let (c_hi, f_hi) = upper_quantile(&mut v.clone(), hi).unwrap();
        prop_assert!(c_lo >= c_hi);
        prop_assert!(f_lo <= lo + 1e-12 && f_hi <= hi + 1e-12);
    }

    #[test]
    fn epower_is_monotone_and_linear(sd in 1e-3f64..1e3) {
        let s = epower_effect_size(EPowerLevel::Small, sd).unwrap();
        let m = epower_effect_size(EPowerLevel::Medium, sd).unwrap();
        let l = epower_effect_size(EPowerLevel::Large, sd).unwrap();
        prop_assert!(s < m && m < l);
        let unit = epower_effect_size(EPowerLevel::Medium, 1.0).unwrap();
        prop_assert!((m - unit * sd).abs() <= 1e-12 * m);
    }

    #[test]
    fn induced_delta_symmetries(a in 0.01f64..100.0, b in 0.01f64..100.0) {
        let d = induced_delta(a, b).unwrap();
        prop_assert!((d - induced_delta(b, a).unwrap()).abs() <= 1e-12 * d);
        prop_assert!((d - induced_delta(1.0 / a, 1.0 / b).unwrap()).abs() <= 1e-9 * d);
        prop_assert!((induced_delta(a, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_are_consistent(flags in prop::collection::vec(prop::collection::vec(any::<bool>(), 15), 1..40), which in 0usize..4) {
        let e = |l: &str| EffectId::parse(l, 4).unwrap();
        let loc = match which {
            0 => vec![],
            1 => vec![SignedEffect::positive(e("A"))],
            2 => vec![SignedEffect::positive(e("B")), SignedEffect::negative(e("AB"))],
            _ => vec![SignedEffect::positive(e("C")), SignedEffect::positive(e("ABCD"))],
        };
        let s = Scenario::new(4, loc, vec![e("A")], 9.0, EPowerLevel::Medium).unwrap();
        let r = metrics_from_flags(MethodKind::Bp91, &s, &flags).unwrap();
        r.check().unwrap();
        prop_assert_eq!(r.ap.is_some(), which > 0);
        prop_assert_eq!(r.jp.is_some(), which >= 2);
    }
}
