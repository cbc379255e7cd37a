//! Full two-level factorial designs in Yates order and OLS contrast estimation.
//!
//! Effect `j` (for `0 <= j < 2^k`) is identified with the set of factors whose
//! bits are set in `j`: bit 0 is factor `A`, bit 1 is `B`, and so on. This makes
//! Yates order (`(I)`, `A`, `B`, `AB`, `C`, ...) the natural integer order, and
//! the elementwise product of two columns the XOR of their indices.
//!
//! Run `i` sets factor `f` high (`+1`) when bit `f` of `i` is set, so run 0 is
//! the all-low treatment combination.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MIN_FACTORS: usize = 2;
pub const MAX_FACTORS: usize = 8;

const FACTOR_LETTERS: &[u8; MAX_FACTORS] = b"ABCDEFGH";

/// Index of a column of the model matrix; 0 is the intercept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffectId(u16);

impl EffectId {
    pub const INTERCEPT: EffectId = EffectId(0);

    pub fn new(index: usize, k: usize) -> Result<Self> {
        check_k(k)?;
        if index >= 1 << k {
            return Err(Error::Domain(format!(
                "effect index {index} out of range for k={k} (max {})",
                (1 << k) - 1
            )));
        }
        Ok(EffectId(index as u16))
    }

    pub(crate) fn new_unchecked(index: usize) -> Self {
        EffectId(index as u16)
    }

    /// Single-factor main effect (`factor` 0 is `A`).
    pub fn main(factor: usize) -> Self {
        assert!(factor < MAX_FACTORS, "factor {factor} out of range");
        EffectId(1 << factor)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_intercept(self) -> bool {
        self.0 == 0
    }

    /// Number of factors in the interaction (0 for the intercept).
    pub fn order(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains_factor(self, factor: usize) -> bool {
        self.0 & (1 << factor) != 0
    }

    pub fn is_valid_for(self, k: usize) -> bool {
        (self.0 as usize) < (1 << k)
    }

    pub fn label(self) -> String {
        if self.0 == 0 {
            return "(I)".to_string();
        }
        (0..MAX_FACTORS)
            .filter(|&f| self.contains_factor(f))
            .map(|f| FACTOR_LETTERS[f] as char)
            .collect()
    }

    /// Parses a canonical label. Letters may appear in any order but each at most once.
    pub fn parse(label: &str, k: usize) -> Result<Self> {
        check_k(k)?;
        let label = label.trim();
        if label == "(I)" || label == "I" {
            return Ok(EffectId::INTERCEPT);
        }
        if label.is_empty() {
            return Err(Error::Parse("empty effect label".into()));
        }
        let mut bits = 0u16;
        for ch in label.chars() {
            let up = ch.to_ascii_uppercase();
            if !up.is_ascii_uppercase() || (up as u8 - b'A') as usize >= k {
                return Err(Error::Parse(format!(
                    "'{ch}' in effect label '{label}' is not a factor for k={k}"
                )));
            }
            let f = (up as u8 - b'A') as usize;
            if bits & (1 << f) != 0 {
                return Err(Error::Parse(format!("repeated factor '{ch}' in effect label '{label}'")));
            }
            bits |= 1 << f;
        }
        Ok(EffectId(bits))
    }
}

impl fmt::Display for EffectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

// Serialised by label so JSON maps read {"A": 9.0, "BC": ...}.
impl Serialize for EffectId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for EffectId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        EffectId::parse(&s, MAX_FACTORS).map_err(serde::de::Error::custom)
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(MIN_FACTORS..=MAX_FACTORS).contains(&k) {
        return Err(Error::Domain(format!(
            "number of factors k={k} must satisfy {MIN_FACTORS} <= k <= {MAX_FACTORS}"
        )));
    }
    Ok(())
}

/// The ±1 model matrix of an unreplicated 2^k factorial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorialDesign {
    k: usize,
    n: usize,
    // row-major n×n
    columns: Vec<i8>,
    effects: Vec<EffectId>,
}

impl FactorialDesign {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of runs, 2^k.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of non-intercept effects, n − 1.
    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn effects(&self) -> &[EffectId] {
        &self.effects
    }

    /// Non-intercept effects in Yates order.
    pub fn location_effects(&self) -> &[EffectId] {
        &self.effects[1..]
    }

    pub fn entry(&self, run: usize, effect: EffectId) -> i8 {
        self.columns[run * self.n + effect.index()]
    }

    pub fn column(&self, effect: EffectId) -> Vec<i8> {
        (0..self.n).map(|i| self.entry(i, effect)).collect()
    }

    pub fn row(&self, run: usize) -> &[i8] {
        &self.columns[run * self.n..(run + 1) * self.n]
    }

    /// Factor levels (±1) of one run, factor A first.
    pub fn run_levels(&self, run: usize) -> Vec<i8> {
        (0..self.k).map(|f| self.entry(run, EffectId::main(f))).collect()
    }

    /// Run index of a treatment combination given as ±1 levels, factor A first.
    pub fn run_index(&self, levels: &[i8]) -> Option<usize> {
        if levels.len() != self.k {
            return None;
        }
        let mut idx = 0;
        for (f, &l) in levels.iter().enumerate() {
            match l {
                1 => idx |= 1 << f,
                -1 => {}
                _ => return None,
            }
        }
        Some(idx)
    }

    /// X'X computed in integer arithmetic.
    pub fn gram(&self) -> Vec<i64> {
        let n = self.n;
        let mut g = vec![0i64; n * n];
        for a in 0..n {
            for b in a..n {
                let s: i64 = (0..n)
                    .map(|i| i64::from(self.columns[i * n + a]) * i64::from(self.columns[i * n + b]))
                    .sum();
                g[a * n + b] = s;
                g[b * n + a] = s;
            }
        }
        g
    }

    /// X·β for a full coefficient vector (intercept first).
    pub fn fitted(&self, beta: &[f64]) -> Vec<f64> {
        assert_eq!(beta.len(), self.n, "coefficient vector length must equal n");
        synthesize(beta)
    }
}

pub fn build_design(k: usize) -> Result<FactorialDesign> {
    check_k(k)?;
    let n = 1usize << k;
    let mut columns = vec![0i8; n * n];
    for i in 0..n {
        for j in 0..n {
            // (-1)^(number of factors in j that are low in run i)
            let low = (j & !i).count_ones();
            columns[i * n + j] = if low % 2 == 0 { 1 } else { -1 };
        }
    }
    let effects = (0..n).map(|j| EffectId(j as u16)).collect();
    Ok(FactorialDesign { k, n, columns, effects })
}

/// OLS estimates from one unreplicated experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimates {
    pub design_k: usize,
    pub intercept: f64,
    /// β̂₁..β̂ₙ₋₁ in Yates order.
    pub values: Vec<f64>,
}

impl EffectEstimates {
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, effect: EffectId) -> f64 {
        if effect.is_intercept() {
            self.intercept
        } else {
            self.values[effect.index() - 1]
        }
    }

    /// Full coefficient vector with the intercept in position 0.
    pub fn full(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.values.len() + 1);
        b.push(self.intercept);
        b.extend_from_slice(&self.values);
        b
    }

    /// Indices (0-based into `values`) sorted by decreasing |β̂|, ties by index.
    pub fn magnitude_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .abs()
                .total_cmp(&self.values[a].abs())
                .then(a.cmp(&b))
        });
        order
    }
}

/// β̂ⱼ = xⱼ'y / n for every column.
pub fn estimate_effects(design: &FactorialDesign, y: &[f64]) -> Result<EffectEstimates> {
    if y.len() != design.n {
        return Err(Error::Domain(format!(
            "response length {} does not match n={} runs",
            y.len(),
            design.n
        )));
    }
    let b = analyze_contrasts(y);
    Ok(EffectEstimates {
        design_k: design.k,
        intercept: b[0],
        values: b[1..].to_vec(),
    })
}

/// In-place Walsh–Hadamard butterfly with natural (Sylvester) ordering.
pub(crate) fn fwht(x: &mut [f64]) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let a = x[j];
                let b = x[j + h];
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// X'y / n via the fast transform. Our columns differ from Sylvester rows by the
/// sign (−1)^|j|, since a factor's low level is −1.
pub(crate) fn analyze_contrasts(y: &[f64]) -> Vec<f64> {
    let mut b = y.to_vec();
    analyze_contrasts_in_place(&mut b);
    b
}

pub(crate) fn analyze_contrasts_in_place(b: &mut [f64]) {
    let n = b.len();
    fwht(b);
    let inv = 1.0 / n as f64;
    for (j, v) in b.iter_mut().enumerate() {
        *v *= if j.count_ones() % 2 == 0 { inv } else { -inv };
    }
}

/// X·β via the fast transform.
pub(crate) fn synthesize(beta: &[f64]) -> Vec<f64> {
    let mut y: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(j, &v)| if j.count_ones() % 2 == 0 { v } else { -v })
        .collect();
    fwht(&mut y);
    y
}

pub fn interaction_product(a: EffectId, b: EffectId, k: usize) -> Result<EffectId> {
    check_k(k)?;
    for e in [a, b] {
        if !e.is_valid_for(k) {
            return Err(Error::Domain(format!("effect {e} not valid for k={k}")));
        }
    }
    Ok(EffectId(a.0 ^ b.0))
}

/// Unordered pairs (j1, j2), j1 < j2, both non-intercept, with j1∘j2 = d.
pub fn interaction_pairs(d: EffectId, k: usize) -> Result<Vec<(EffectId, EffectId)>> {
    check_k(k)?;
    if d.is_intercept() {
        return Err(Error::Domain("interaction pairs are undefined for the intercept".into()));
    }
    if !d.is_valid_for(k) {
        return Err(Error::Domain(format!("effect {d} not valid for k={k}")));
    }
    let n = 1u16 << k;
    Ok((1..n)
        .filter_map(|j1| {
            let j2 = j1 ^ d.0;
            (j2 > j1).then_some((EffectId(j1), EffectId(j2)))
        })
        .collect())
}
