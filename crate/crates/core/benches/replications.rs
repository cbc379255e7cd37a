use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use factorial_screen::calibrate::{calibrate_all, calibrate_method, CalibrationOptions, EPowerLevel};
use factorial_screen::simstudy::{run_scenario, Scenario, SignedEffect};
use factorial_screen::{EffectId, Executor, MethodKind, SeedSpec};

fn executors() -> Vec<(&'static str, Executor)> {
    let mut v = vec![("sequential", Executor::sequential())];
    if cfg!(feature = "parallel") {
        let workers = std::thread::available_parallelism().map_or(4, |n| n.get().max(4));
        v.push(("parallel", Executor::new(workers)));
    }
    v
}

fn scenario_replications(c: &mut Criterion) {
    let e = |l: &str| EffectId::parse(l, 4).unwrap();
    let opts = CalibrationOptions { ln97_permutations: 200, ..CalibrationOptions::default() };
    let cal = calibrate_all(&MethodKind::ALL, 0.05, 500, SeedSpec::new(1, 0), &opts, &Executor::new(0)).unwrap();
    let s = Scenario::new(4, vec![SignedEffect::positive(e("B")), SignedEffect::positive(e("AB"))], vec![e("A")], 25.0, EPowerLevel::Medium)
        .unwrap();
    let mut g = c.benchmark_group("run_scenario_200_reps");
    g.sample_size(10);
    for (name, exec) in executors() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(run_scenario(&s, &MethodKind::ALL, &cal, 200, SeedSpec::new(2, 0), &exec).unwrap()))
        });
    }
    g.finish();
}

fn calibration(c: &mut Criterion) {
    let opts = CalibrationOptions::default();
    let mut g = c.benchmark_group("calibrate_bm86_500_reps");
    g.sample_size(10);
    for (name, exec) in executors() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(calibrate_method(MethodKind::Bm86, 0.05, 500, SeedSpec::new(3, 0), &opts, &exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, scenario_replications, calibration);
criterion_main!(benches);
