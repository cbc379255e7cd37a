//! Multiplicative dispersion model: per-run variances, the exact covariance of
//! the OLS contrasts it implies, and the closed-form correlation pattern for one
//! or two dispersion effects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::design::{interaction_product, EffectId, FactorialDesign};
use crate::error::{Error, Result};

/// Variance ratios Δⱼ (+ level over − level) and the base variance σ².
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionSpec {
    deltas: BTreeMap<EffectId, f64>,
    base_sigma2: f64,
}

impl DispersionSpec {
    pub fn new(deltas: impl IntoIterator<Item = (EffectId, f64)>, base_sigma2: f64) -> Result<Self> {
        if !(base_sigma2 > 0.0 && base_sigma2.is_finite()) {
            return Err(Error::Domain(format!("base variance must be positive, got {base_sigma2}")));
        }
        let mut map = BTreeMap::new();
        for (e, d) in deltas {
            if e.is_intercept() {
                return Err(Error::Domain("the intercept cannot carry a dispersion effect".into()));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Domain(format!("dispersion ratio for {e} must be positive, got {d}")));
            }
            map.insert(e, d);
        }
        Ok(DispersionSpec { deltas: map, base_sigma2 })
    }

    /// No dispersion effects.
    pub fn homoscedastic(base_sigma2: f64) -> Result<Self> {
        Self::new([], base_sigma2)
    }

    pub fn base_sigma2(&self) -> f64 {
        self.base_sigma2
    }

    /// Δⱼ, defaulting to 1.
    pub fn delta(&self, e: EffectId) -> f64 {
        self.deltas.get(&e).copied().unwrap_or(1.0)
    }

    pub fn deltas(&self) -> &BTreeMap<EffectId, f64> {
        &self.deltas
    }

    /// Effects whose ratio differs from 1.
    pub fn active(&self) -> Vec<(EffectId, f64)> {
        self.deltas
            .iter()
            .filter(|(_, &d)| d != 1.0)
            .map(|(&e, &d)| (e, d))
            .collect()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        match self.deltas.keys().find(|e| !e.is_valid_for(k)) {
            Some(e) => Err(Error::Domain(format!("dispersion effect {e} not valid for k={k}"))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LocationSpec {
    pub betas: BTreeMap<EffectId, f64>,
    pub intercept: f64,
}

impl LocationSpec {
    pub fn new(betas: impl IntoIterator<Item = (EffectId, f64)>, intercept: f64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, b) in betas {
            if e.is_intercept() {
                return Err(Error::Domain("use `intercept` for β₀, not an effect key".into()));
            }
            if !b.is_finite() {
                return Err(Error::Domain(format!("location effect {e} must be finite")));
            }
            map.insert(e, b);
        }
        Ok(LocationSpec { betas: map, intercept })
    }

    pub fn beta(&self, e: EffectId) -> f64 {
        if e.is_intercept() {
            self.intercept
        } else {
            self.betas.get(&e).copied().unwrap_or(0.0)
        }
    }

    /// Full coefficient vector of length n, intercept first.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        let mut b = vec![0.0; n];
        b[0] = self.intercept;
        for (e, &v) in &self.betas {
            b[e.index()] = v;
        }
        b
    }

    /// Non-zero location effects.
    pub fn active(&self) -> Vec<EffectId> {
        self.betas.iter().filter(|(_, &b)| b != 0.0).map(|(&e, _)| e).collect()
    }
}

/// A data-generating truth: location effects, dispersion effects and σ².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioModelJson", into = "ScenarioModelJson")]
pub struct ScenarioModel {
    pub k: usize,
    pub location: LocationSpec,
    pub dispersion: DispersionSpec,
}

impl ScenarioModel {
    pub fn new(k: usize, location: LocationSpec, dispersion: DispersionSpec) -> Result<Self> {
        crate::design::build_design(k)?;
        dispersion.check_k(k)?;
        if let Some(e) = location.betas.keys().find(|e| !e.is_valid_for(k)) {
            return Err(Error::Domain(format!("location effect {e} not valid for k={k}")));
        }
        Ok(ScenarioModel { k, location, dispersion })
    }

    /// β = 0, Δ = 1.
    pub fn null(k: usize, sigma2: f64) -> Result<Self> {
        Self::new(k, LocationSpec::default(), DispersionSpec::homoscedastic(sigma2)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioModelJson {
    k: usize,
    #[serde(default)]
    location: BTreeMap<String, f64>,
    #[serde(default)]
    dispersion: BTreeMap<String, f64>,
    sigma2: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    intercept: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl TryFrom<ScenarioModelJson> for ScenarioModel {
    type Error = Error;

    fn try_from(j: ScenarioModelJson) -> Result<Self> {
        let parse = |m: BTreeMap<String, f64>| -> Result<Vec<(EffectId, f64)>> {
            m.into_iter()
                .map(|(l, v)| Ok((EffectId::parse(&l, j.k)?, v)))
                .collect()
        };
        let location = LocationSpec::new(parse(j.location)?, j.intercept)?;
        let dispersion = DispersionSpec::new(parse(j.dispersion)?, j.sigma2)?;
        ScenarioModel::new(j.k, location, dispersion)
    }
}

impl From<ScenarioModel> for ScenarioModelJson {
    fn from(s: ScenarioModel) -> Self {
        ScenarioModelJson {
            k: s.k,
            location: s.location.betas.iter().map(|(e, &v)| (e.label(), v)).collect(),
            dispersion: s.dispersion.deltas.iter().map(|(e, &v)| (e.label(), v)).collect(),
            sigma2: s.dispersion.base_sigma2,
            intercept: s.location.intercept,
        }
    }
}

/// σᵢ² = σ² ∏ⱼ Δⱼ^(xᵢⱼ/2).
pub fn variance_vector(design: &FactorialDesign, disp: &DispersionSpec) -> Result<Vec<f64>> {
    disp.check_k(design.k())?;
    let active = disp.active();
    Ok((0..design.n())
        .map(|i| {
            let log: f64 = active
                .iter()
                .map(|&(e, d)| 0.5 * f64::from(design.entry(i, e)) * d.ln())
                .sum();
            disp.base_sigma2 * log.exp()
        })
        .collect())
}

/// Dense symmetric matrix indexed by non-intercept effect (row/col 0 is effect 1).
#[derive(Clone, Debug, PartialEq)]
pub struct EffectMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl EffectMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry for a pair of non-intercept effects.
    pub fn get(&self, a: EffectId, b: EffectId) -> f64 {
        self.data[(a.index() - 1) * self.dim + b.index() - 1]
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn to_correlation(&self) -> EffectMatrix {
        let d = self.dim;
        let sd: Vec<f64> = (0..d).map(|i| self.at(i, i).sqrt()).collect();
        let data = (0..d * d).map(|x| self.data[x] / (sd[x / d] * sd[x % d])).collect();
        EffectMatrix { dim: d, data }
    }
}

/// Cov(β̂) = X'ΣX / n² over the non-intercept effects, Σ = diag(σᵢ²).
pub fn effect_covariance(design: &FactorialDesign, disp: &DispersionSpec) -> Result<EffectMatrix> {
    let var = variance_vector(design, disp)?;
    let n = design.n();
    let m = n - 1;
    let n2 = (n * n) as f64;
    let mut data = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let s: f64 = (0..n)
                .map(|i| {
                    let row = design.row(i);
                    f64::from(row[a + 1]) * f64::from(row[b + 1]) * var[i]
                })
                .sum();
            data[a * m + b] = s / n2;
            data[b * m + a] = s / n2;
        }
    }
    Ok(EffectMatrix { dim: m, data })
}

/// Common variance of every β̂ⱼ: mean(σᵢ²) / n.
pub fn effect_variance(design: &FactorialDesign, disp: &DispersionSpec) -> Result<f64> {
    let var = variance_vector(design, disp)?;
    Ok(var.iter().sum::<f64>() / (design.n() * design.n()) as f64)
}

/// (√Δ − 1/√Δ) / (√Δ + 1/√Δ), the correlation induced along one dispersion column.
pub fn triple_correlation(delta: f64) -> f64 {
    (delta - 1.0) / (delta + 1.0)
}

/// Closed-form correlation of β̂_{j1} and β̂_{j2} for at most two dispersion effects.
pub fn theoretical_correlation(
    j1: EffectId,
    j2: EffectId,
    disp: &DispersionSpec,
    k: usize,
) -> Result<f64> {
    if j1 == j2 || j1.is_intercept() || j2.is_intercept() {
        return Err(Error::Domain(format!(
            "correlation needs two distinct non-intercept effects, got {j1} and {j2}"
        )));
    }
    disp.check_k(k)?;
    let product = interaction_product(j1, j2, k)?;
    let active = disp.active();
    let rho = match active.as_slice() {
        [] => 0.0,
        [(a, da)] => {
            if product == *a {
                triple_correlation(*da)
            } else {
                0.0
            }
        }
        [(a, da), (b, db)] => {
            if product == *a {
                triple_correlation(*da)
            } else if product == *b {
                triple_correlation(*db)
            } else if product == interaction_product(*a, *b, k)? {
                triple_correlation(*da) * triple_correlation(*db)
            } else {
                0.0
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "closed-form correlations exist for at most two dispersion effects, got {}; \
                 normalise effect_covariance instead",
                active.len()
            )))
        }
    };
    Ok(rho)
}

/// Δ_AB = (1 + Δ_A Δ_B) / (Δ_A + Δ_B).
pub fn induced_delta(delta_a: f64, delta_b: f64) -> Result<f64> {
    if !(delta_a > 0.0 && delta_b > 0.0) {
        return Err(Error::Domain(format!(
            "dispersion ratios must be positive, got {delta_a} and {delta_b}"
        )));
    }
    Ok((1.0 + delta_a * delta_b) / (delta_a + delta_b))
}

/// Cosets of {(I), A, B, AB} for the two dispersion effects A and B. The coset
/// holding the intercept comes first; members are in Yates order.
pub fn correlation_quadruples(disp: &DispersionSpec, k: usize) -> Result<Vec<[EffectId; 4]>> {
    disp.check_k(k)?;
    let active = disp.active();
    let [(a, _), (b, _)] = active.as_slice() else {
        return Err(Error::Unsupported(format!(
            "correlation quadruples need exactly two dispersion effects, got {}",
            active.len()
        )));
    };
    let ab = interaction_product(*a, *b, k)?;
    let n = 1usize << k;
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n / 4);
    for c in 0..n {
        if seen[c] {
            continue;
        }
        let c = EffectId::new(c, k)?;
        let mut quad = [
            c,
            interaction_product(c, *a, k)?,
            interaction_product(c, *b, k)?,
            interaction_product(c, ab, k)?,
        ];
        quad.sort();
        for e in quad {
            seen[e.index()] = true;
        }
        out.push(quad);
    }
    Ok(out)
}
