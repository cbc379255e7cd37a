//! Scenario grid, replicated simulation and error-rate / power summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calibrate::{epower_effect_size, CalibrationFile, EPowerLevel};
use crate::datagen::{ResponseSampler, SeedSpec};
use crate::design::{build_design, estimate_effects, EffectId, FactorialDesign};
use crate::dispersion::{effect_covariance, DispersionSpec, LocationSpec, ScenarioModel};
use crate::error::{Error, Result};
use crate::methods::{analyze_all, MethodConfig, MethodDecision, MethodKind};
use crate::parallel::Executor;

pub const DELTA_GRID: [f64; 7] = [1.0, 4.0, 9.0, 25.0, 100.0, 400.0, 2500.0];
pub const DEFAULT_REPS: usize = 1825;
/// Histogram bins 0..=6 plus a final "7 or more" bin.
pub const HISTOGRAM_BINS: usize = 8;

/// A location effect with the sign of its coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEffect {
    pub effect: EffectId,
    pub negative: bool,
}

impl SignedEffect {
    pub fn positive(effect: EffectId) -> Self {
        SignedEffect { effect, negative: false }
    }

    pub fn negative(effect: EffectId) -> Self {
        SignedEffect { effect, negative: true }
    }

    pub fn sign(self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for SignedEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-{}", self.effect)
        } else {
            write!(f, "{}", self.effect)
        }
    }
}

impl Serialize for SignedEffect {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignedEffect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (negative, label) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(&s)),
        };
        let effect = EffectId::parse(label, 8).map_err(serde::de::Error::custom)?;
        Ok(SignedEffect { effect, negative })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_k")]
    pub k: usize,
    pub location: Vec<SignedEffect>,
    pub dispersion: Vec<EffectId>,
    /// Variance ratio applied to every dispersion effect.
    pub delta: f64,
    pub epower: EPowerLevel,
}

fn default_k() -> usize {
    4
}

impl Scenario {
    pub fn new(
        k: usize,
        location: Vec<SignedEffect>,
        dispersion: Vec<EffectId>,
        delta: f64,
        epower: EPowerLevel,
    ) -> Result<Self> {
        let s = Scenario { k, location, dispersion, delta, epower };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        build_design(self.k)?;
        if self.location.len() > 2 || self.dispersion.len() > 2 {
            return Err(Error::Unsupported("scenarios hold at most two location and two dispersion effects".into()));
        }
        let mut seen = Vec::new();
        for e in self.location.iter().map(|l| l.effect) {
            if e.is_intercept() || !e.is_valid_for(self.k) || seen.contains(&e) {
                return Err(Error::Domain(format!("invalid location effect {e} for k={}", self.k)));
            }
            seen.push(e);
        }
        seen.clear();
        for &e in &self.dispersion {
            if e.is_intercept() || !e.is_valid_for(self.k) || seen.contains(&e) {
                return Err(Error::Domain(format!("invalid dispersion effect {e} for k={}", self.k)));
            }
            seen.push(e);
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Domain(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    /// Scenario without the Δ value, e.g. `dA_lB.AB_medium`.
    pub fn family(&self) -> String {
        let disp = join_labels(self.dispersion.iter().map(|e| e.label()));
        if self.location.is_empty() {
            return format!("d{disp}_l0");
        }
        let loc = join_labels(
            self.location
                .iter()
                .map(|l| if l.negative { format!("m{}", l.effect) } else { l.effect.label() }),
        );
        format!("d{disp}_l{loc}_{}", self.epower)
    }

    /// File-name safe identifier, e.g. `dA_lB.AB_medium_x400`.
    pub fn id(&self) -> String {
        format!("{}_x{}", self.family(), self.delta)
    }

    pub fn active_effects(&self) -> Vec<EffectId> {
        let mut v: Vec<EffectId> = self.location.iter().map(|l| l.effect).collect();
        v.sort();
        v
    }

    /// Location effects sized by EPower against the dispersion-adjusted
    /// standard deviation of each estimate; base variance 1.
    pub fn model(&self) -> Result<ScenarioModel> {
        self.validate()?;
        let design = build_design(self.k)?;
        let disp = DispersionSpec::new(self.dispersion.iter().map(|&e| (e, self.delta)), 1.0)?;
        let cov = effect_covariance(&design, &disp)?;
        let betas = self
            .location
            .iter()
            .map(|l| {
                let sd = cov.get(l.effect, l.effect).sqrt();
                Ok((l.effect, l.sign() * epower_effect_size(self.epower, sd)?))
            })
            .collect::<Result<Vec<_>>>()?;
        ScenarioModel::new(self.k, LocationSpec::new(betas, 0.0)?, disp)
    }
}

fn join_labels(labels: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = labels.collect();
    if v.is_empty() {
        "0".into()
    } else {
        v.join(".")
    }
}

fn ids(labels: &[&str]) -> Vec<EffectId> {
    labels.iter().map(|l| EffectId::parse(l, 4).expect("valid label")).collect()
}

/// The eight (dispersion, location) rows of the study crossed with the Δ grid
/// and the EPower levels, followed by the location-null rows for D = {A} and
/// D = {A, B} over the Δ grid.
pub fn table1_scenarios() -> Vec<Scenario> {
    let rows: [(&[&str], &[&str]); 8] = [
        (&["A"], &["A"]),
        (&["A"], &["B"]),
        (&["A"], &["B", "C"]),
        (&["A"], &["A", "B"]),
        (&["A"], &["B", "AB"]),
        (&["A", "B"], &["A"]),
        (&["A", "B"], &["C"]),
        (&["A", "B"], &["AB"]),
    ];
    let mut out = Vec::new();
    for (disp, loc) in rows {
        for delta in DELTA_GRID {
            for epower in EPowerLevel::ALL {
                out.push(Scenario {
                    k: 4,
                    location: ids(loc).into_iter().map(SignedEffect::positive).collect(),
                    dispersion: ids(disp),
                    delta,
                    epower,
                });
            }
        }
    }
    for disp in [&["A"][..], &["A", "B"][..]] {
        for delta in DELTA_GRID {
            out.push(Scenario {
                k: 4,
                location: Vec::new(),
                dispersion: ids(disp),
                delta,
                epower: EPowerLevel::Medium,
            });
        }
    }
    out
}

pub fn read_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let list: Vec<Scenario> = serde_json::from_str(&fs::read_to_string(path)?)?;
    for s in &list {
        s.validate()?;
    }
    Ok(list)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: MethodKind,
    pub scenario: Scenario,
    pub rr: BTreeMap<EffectId, f64>,
    pub ier: f64,
    pub eer: f64,
    pub ap: Option<f64>,
    pub jp: Option<f64>,
    /// Fraction of replications declaring 0, 1, ..., 6 and ≥ 7 inactive effects active.
    pub histogram: [f64; HISTOGRAM_BINS],
    pub n_reps: usize,
}

impl MetricsRecord {
    /// Internal consistency of the summaries with the rejection rates.
    pub fn check(&self) -> Result<()> {
        let active = self.scenario.active_effects();
        let eps = 1e-12;
        let inactive: Vec<f64> = self
            .rr
            .iter()
            .filter(|(e, _)| !active.contains(e))
            .map(|(_, &r)| r)
            .collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let bad = |what: &str| Err(Error::Validation(format!("{} {}: {what}", self.method, self.scenario.id())));
        if (mean(&inactive) - self.ier).abs() > eps {
            return bad("ier differs from mean inactive rr");
        }
        if inactive.iter().any(|&r| r > self.eer + eps) {
            return bad("eer below an inactive rr");
        }
        let act: Vec<f64> = active.iter().map(|e| self.rr[e]).collect();
        match self.ap {
            Some(ap) if act.is_empty() || (mean(&act) - ap).abs() > eps => return bad("ap differs from mean active rr"),
            None if !act.is_empty() => return bad("ap missing"),
            _ => {}
        }
        if let Some(jp) = self.jp {
            if act.len() < 2 || act.iter().any(|&r| jp > r + eps) {
                return bad("jp exceeds a marginal rr");
            }
        }
        if (self.histogram.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("histogram does not sum to one");
        }
        Ok(())
    }
}

/// Summaries from per-replication active flags (indexed like effect
/// estimates, i.e. effect index − 1).
pub fn metrics_from_flags(method: MethodKind, scenario: &Scenario, flags: &[Vec<bool>]) -> Result<MetricsRecord> {
    if flags.is_empty() {
        return Err(Error::Domain("no replications to summarize".into()));
    }
    let m = flags[0].len();
    let n_reps = flags.len();
    let active: Vec<usize> = scenario.active_effects().iter().map(|e| e.index() - 1).collect();
    let mut counts = vec![0usize; m];
    let mut any_false = 0usize;
    let mut joint = 0usize;
    let mut hist = [0usize; HISTOGRAM_BINS];
    for row in flags {
        if row.len() != m {
            return Err(Error::Domain("replications disagree on the number of effects".into()));
        }
        let mut false_rej = 0usize;
        for (j, &f) in row.iter().enumerate() {
            if f {
                counts[j] += 1;
                if !active.contains(&j) {
                    false_rej += 1;
                }
            }
        }
        any_false += usize::from(false_rej > 0);
        hist[false_rej.min(HISTOGRAM_BINS - 1)] += 1;
        joint += usize::from(active.iter().all(|&j| row[j]));
    }
    let r = n_reps as f64;
    let rr: BTreeMap<EffectId, f64> = counts
        .iter()
        .enumerate()
        .map(|(j, &c)| (EffectId::new_unchecked(j + 1), c as f64 / r))
        .collect();
    let inactive_total: usize = (0..m).filter(|j| !active.contains(j)).map(|j| counts[j]).sum();
    let ier = inactive_total as f64 / (r * (m - active.len()) as f64);
    let ap = (!active.is_empty())
        .then(|| active.iter().map(|&j| counts[j]).sum::<usize>() as f64 / (r * active.len() as f64));
    let jp = (active.len() >= 2).then(|| joint as f64 / r);
    let mut histogram = [0.0; HISTOGRAM_BINS];
    for (h, &c) in histogram.iter_mut().zip(&hist) {
        *h = c as f64 / r;
    }
    Ok(MetricsRecord {
        method,
        scenario: scenario.clone(),
        rr,
        ier,
        eer: any_false as f64 / r,
        ap,
        jp,
        histogram,
        n_reps,
    })
}

pub fn compute_metrics(decisions: &[MethodDecision], truth: &Scenario) -> Result<MetricsRecord> {
    let Some(first) = decisions.first() else {
        return Err(Error::Domain("no decisions to summarize".into()));
    };
    if decisions.iter().any(|d| d.method != first.method) {
        return Err(Error::Domain("decisions mix several methods".into()));
    }
    let flags: Vec<Vec<bool>> = decisions.iter().map(|d| d.active_flags()).collect();
    metrics_from_flags(first.method, truth, &flags)
}

/// Seed of replication `rep` within a scenario run started at `base`.
pub fn replicate_seed(base: SeedSpec, rep: usize) -> SeedSpec {
    base.offset(rep as u64)
}

/// Stream base of the `index`-th scenario of a study.
pub fn scenario_seed(master_seed: u64, index: usize) -> SeedSpec {
    SeedSpec::new(master_seed, (index as u64) << 32)
}

/// The dataset analyzed in replication `rep`.
pub fn scenario_dataset(design: &FactorialDesign, scenario: &Scenario, base: SeedSpec, rep: usize) -> Result<Vec<f64>> {
    Ok(ResponseSampler::new(design, &scenario.model()?)?.sample(replicate_seed(base, rep)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub seed: SeedSpec,
    pub records: Vec<MetricsRecord>,
}

fn scenario_config(calib: &CalibrationFile, k: usize, methods: &[MethodKind]) -> Result<MethodConfig> {
    calib.require(methods)?;
    if calib.k() != k {
        return Err(Error::Config(format!("calibration is for k={} but the scenario has k={k}", calib.k())));
    }
    Ok(calib.config.clone())
}

/// Simulates `n_reps` datasets from the scenario; every method analyzes the
/// same dataset in each replication.
pub fn run_scenario(
    scenario: &Scenario,
    methods: &[MethodKind],
    calib: &CalibrationFile,
    n_reps: usize,
    seed: SeedSpec,
    exec: &Executor,
) -> Result<ScenarioRun> {
    if n_reps == 0 || methods.is_empty() {
        return Err(Error::Domain("need at least one replication and one method".into()));
    }
    let cfg = scenario_config(calib, scenario.k, methods)?;
    let design = build_design(scenario.k)?;
    let sampler = ResponseSampler::new(&design, &scenario.model()?)?;
    let per_rep = exec.try_map(n_reps, |r| {
        let s = replicate_seed(seed, r);
        let y = sampler.sample(s);
        let est = estimate_effects(&design, &y)?;
        let decisions = analyze_all(&design, &y, &est, &cfg, methods, s)?;
        Ok::<_, Error>(decisions.into_iter().map(|d| d.active_flags()).collect::<Vec<_>>())
    })?;
    let mut records = Vec::with_capacity(methods.len());
    for (i, &method) in methods.iter().enumerate() {
        let flags: Vec<Vec<bool>> = per_rep.iter().map(|r| r[i].clone()).collect();
        let rec = metrics_from_flags(method, scenario, &flags)?;
        rec.check()?;
        records.push(rec);
    }
    Ok(ScenarioRun { scenario: scenario.clone(), seed, records })
}

/// Runs every scenario; scenario i draws from streams starting at i·2³².
pub fn run_study(
    scenarios: &[Scenario],
    methods: &[MethodKind],
    calib: &CalibrationFile,
    n_reps: usize,
    master_seed: u64,
    exec: &Executor,
) -> Result<Vec<ScenarioRun>> {
    scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| run_scenario(s, methods, calib, n_reps, scenario_seed(master_seed, i), exec))
        .collect()
}

fn fmt_rate(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_rate).unwrap_or_default()
}

/// Columns: method, effect, rr.
pub fn write_rr_csv(run: &ScenarioRun, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "effect", "rr"])?;
    for rec in &run.records {
        for (e, &r) in &rec.rr {
            w.write_record([rec.method.name().to_string(), e.label(), fmt_rate(r)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_COLUMNS: [&str; 8] = ["method", "scenario", "delta", "epower", "ier", "eer", "ap", "jp"];

pub fn write_summary_csv(runs: &[ScenarioRun], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_COLUMNS)?;
    for run in runs {
        for rec in &run.records {
            let s = &rec.scenario;
            w.write_record([
                rec.method.name().to_string(),
                s.id(),
                s.delta.to_string(),
                s.epower.to_string(),
                fmt_rate(rec.ier),
                fmt_rate(rec.eer),
                fmt_opt(rec.ap),
                fmt_opt(rec.jp),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub const HISTOGRAM_COLUMNS: [&str; 12] =
    ["method", "scenario", "0", "1", "2", "3", "4", "5", "6", ">=7", "ier", "eer"];

pub fn write_histogram_csv(runs: &[ScenarioRun], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HISTOGRAM_COLUMNS)?;
    for run in runs {
        for rec in &run.records {
            let mut row = vec![rec.method.name().to_string(), rec.scenario.id()];
            row.extend(rec.histogram.iter().map(|&h| fmt_rate(h)));
            row.push(fmt_rate(rec.ier));
            row.push(fmt_rate(rec.eer));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv`, `histogram.csv` and `scenarios/<id>.csv` under `dir`.
pub fn write_study(runs: &[ScenarioRun], dir: &Path) -> Result<()> {
    let sdir = dir.join("scenarios");
    fs::create_dir_all(&sdir)?;
    for run in runs {
        write_rr_csv(run, &sdir.join(format!("{}.csv", run.scenario.id())))?;
    }
    write_summary_csv(runs, &dir.join("summary.csv"))?;
    write_histogram_csv(runs, &dir.join("histogram.csv"))?;
    Ok(())
}

/// One row of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: MethodKind,
    pub scenario: String,
    pub delta: f64,
    pub epower: EPowerLevel,
    pub ier: f64,
    pub eer: f64,
    pub ap: Option<f64>,
    pub jp: Option<f64>,
}

impl SummaryRow {
    /// Scenario id with the Δ suffix removed.
    pub fn family(&self) -> &str {
        self.scenario.rsplit_once("_x").map_or(&self.scenario, |(f, _)| f)
    }
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SUMMARY_COLUMNS {
        return Err(Error::Parse(format!("{}: unexpected summary header {header:?}", path.display())));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Parse(format!("bad number '{}' in column {}", &rec[i], SUMMARY_COLUMNS[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> { if rec[i].is_empty() { Ok(None) } else { num(i).map(Some) } };
        out.push(SummaryRow {
            method: rec[0].parse()?,
            scenario: rec[1].to_string(),
            delta: num(2)?,
            epower: rec[3].parse()?,
            ier: num(4)?,
            eer: num(5)?,
            ap: opt(6)?,
            jp: opt(7)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::EffectId;

    fn null_scenario() -> Scenario {
        Scenario::new(4, vec![], vec![], 1.0, EPowerLevel::Medium).unwrap()
    }

    fn e(l: &str) -> EffectId {
        EffectId::parse(l, 4).unwrap()
    }

    #[test]
    fn grid_contains_study_rows() {
        let all = table1_scenarios();
        assert_eq!(all.len(), 8 * 7 * 3 + 14);
        assert!(all.iter().any(|s| s.dispersion == vec![e("A")]
            && s.active_effects() == vec![e("B"), e("AB")]));
        assert!(all.iter().any(|s| s.dispersion == vec![e("A"), e("B")] && s.active_effects() == vec![e("AB")]));
        assert!(all.iter().any(|s| s.delta == 2500.0));
        let mut ids: Vec<String> = all.iter().map(Scenario::id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    #[test]
    fn no_rejections_give_zero_rates() {
        let flags = vec![vec![false; 15]; 5];
        let r = metrics_from_flags(MethodKind::Len89, &null_scenario(), &flags).unwrap();
        assert_eq!((r.ier, r.eer, r.ap, r.jp), (0.0, 0.0, None, None));
        assert_eq!(r.histogram[0], 1.0);
        r.check().unwrap();
    }

    #[test]
    fn exact_recovery_gives_full_power() {
        let s = Scenario::new(4, vec![SignedEffect::positive(e("B")), SignedEffect::positive(e("C"))], vec![e("A")], 4.0, EPowerLevel::Small).unwrap();
        let mut row = vec![false; 15];
        row[e("B").index() - 1] = true;
        row[e("C").index() - 1] = true;
        let r = metrics_from_flags(MethodKind::Bp91, &s, &[row]).unwrap();
        assert_eq!((r.ap, r.jp, r.ier, r.eer), (Some(1.0), Some(1.0), 0.0, 0.0));
        r.check().unwrap();
    }

    #[test]
    fn hand_computed_three_replications() {
        // active {A, B}; rep 1: A, B, C; rep 2: A, AB, ABCD; rep 3: nothing
        let s = Scenario::new(4, vec![SignedEffect::positive(e("A")), SignedEffect::positive(e("B"))], vec![], 1.0, EPowerLevel::Medium).unwrap();
        let mk = |ls: &[&str]| {
            let mut v = vec![false; 15];
            for l in ls {
                v[e(l).index() - 1] = true;
            }
            v
        };
        let flags = vec![mk(&["A", "B", "C"]), mk(&["A", "AB", "ABCD"]), mk(&[])];
        let r = metrics_from_flags(MethodKind::Ln97, &s, &flags).unwrap();
        assert!((r.ier - 3.0 / 39.0).abs() < 1e-15);
        assert!((r.eer - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.ap.unwrap() - 0.5).abs() < 1e-15);
        assert!((r.jp.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.rr[&e("A")] - 2.0 / 3.0).abs() < 1e-15);
        let h = r.histogram;
        assert!((h[0] - 1.0 / 3.0).abs() < 1e-15 && (h[1] - 1.0 / 3.0).abs() < 1e-15 && (h[2] - 1.0 / 3.0).abs() < 1e-15);
        r.check().unwrap();
    }

    #[test]
    fn empty_decisions_are_a_domain_error() {
        assert!(matches!(compute_metrics(&[], &null_scenario()), Err(Error::Domain(_))));
    }

    #[test]
    fn epower_sizing_uses_dispersion_adjusted_sd() {
        let s = Scenario::new(4, vec![SignedEffect::negative(e("B"))], vec![e("A")], 9.0, EPowerLevel::Large).unwrap();
        let m = s.model().unwrap();
        // Var(β̂) = mean variance / 16 = (9^{1/2} + 9^{-1/2}) / 2 / 16
        let sd = ((3.0 + 1.0 / 3.0) / 2.0 / 16.0_f64).sqrt();
        let want = -crate::calibrate::epower_delta(0.9).unwrap() * sd;
        assert!((m.location.beta(e("B")) - want).abs() < 1e-12);
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = Scenario::new(4, vec![SignedEffect::positive(e("B")), SignedEffect::negative(e("AB"))], vec![e("A")], 400.0, EPowerLevel::Medium).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"-AB\""));
        assert_eq!(serde_json::from_str::<Scenario>(&j).unwrap(), s);
        assert_eq!(s.id(), "dA_lB.mAB_medium_x400");
    }
}
