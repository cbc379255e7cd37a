//! Heteroscedastic normal responses with reproducible split streams.
//!
//! Every random stream is a ChaCha8 generator keyed by the master seed and a
//! purpose tag, positioned on the ChaCha stream numbered by the replication
//! index. Normal variates use the ziggurat sampler from `rand_distr`
//! (`StandardNormal`); outputs are bit-reproducible for a fixed build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::design::{synthesize, FactorialDesign};
use crate::dispersion::{variance_vector, ScenarioModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// Independent uses of the same (master, stream) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    Response = 1,
    Permutation = 2,
    Calibration = 3,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec { master_seed, stream_index }
    }

    /// Same master seed, stream shifted by `offset`.
    pub fn offset(self, offset: u64) -> Self {
        SeedSpec {
            master_seed: self.master_seed,
            stream_index: self.stream_index.wrapping_add(offset),
        }
    }

    pub fn rng(&self, purpose: StreamPurpose) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        key[16..24].copy_from_slice(b"fscreen1");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Precomputed mean and standard deviation per run for one scenario.
#[derive(Clone, Debug)]
pub struct ResponseSampler {
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl ResponseSampler {
    pub fn new(design: &FactorialDesign, model: &ScenarioModel) -> Result<Self> {
        if model.k != design.k() {
            return Err(Error::Domain(format!(
                "scenario has k={} but design has k={}",
                model.k,
                design.k()
            )));
        }
        let mean = synthesize(&model.location.coefficients(design.n()));
        let sd = variance_vector(design, &model.dispersion)?
            .into_iter()
            .map(f64::sqrt)
            .collect();
        Ok(ResponseSampler { mean, sd })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sd(&self) -> &[f64] {
        &self.sd
    }

    pub fn sample(&self, seed: SeedSpec) -> Vec<f64> {
        let mut rng = seed.rng(StreamPurpose::Response);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.sd)
            .map(|(&mu, &s)| {
                let z: f64 = rng.sample(StandardNormal);
                mu + s * z
            })
            .collect()
    }
}

/// yᵢ = Σⱼ xᵢⱼβⱼ + εᵢ, εᵢ ~ N(0, σᵢ²) independent.
pub fn generate_response(
    design: &FactorialDesign,
    model: &ScenarioModel,
    seed: SeedSpec,
) -> Result<Vec<f64>> {
    Ok(ResponseSampler::new(design, model)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{build_design, estimate_effects, EffectId};
    use crate::dispersion::{DispersionSpec, LocationSpec};
    use statrs::distribution::{ContinuousCDF, Normal};

    fn model_a(delta: f64) -> ScenarioModel {
        let a = EffectId::parse("A", 4).unwrap();
        ScenarioModel::new(
            4,
            LocationSpec::default(),
            DispersionSpec::new([(a, delta)], 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let d = build_design(4).unwrap();
        let m = model_a(9.0);
        let s = SeedSpec::new(42, 7);
        assert_eq!(generate_response(&d, &m, s).unwrap(), generate_response(&d, &m, s).unwrap());
        assert_ne!(
            generate_response(&d, &m, s).unwrap(),
            generate_response(&d, &m, s.offset(1)).unwrap()
        );
    }

    #[test]
    fn purposes_are_distinct_streams() {
        let s = SeedSpec::new(1, 0);
        let a: u64 = s.rng(StreamPurpose::Response).random();
        let b: u64 = s.rng(StreamPurpose::Permutation).random();
        assert_ne!(a, b);
    }

    #[test]
    fn null_estimates_are_unbiased() {
        let d = build_design(4).unwrap();
        let m = ScenarioModel::null(4, 1.0).unwrap();
        let reps = 10_000;
        let a = EffectId::parse("A", 4).unwrap();
        let mean: f64 = (0..reps)
            .map(|r| {
                let y = generate_response(&d, &m, SeedSpec::new(3, r)).unwrap();
                estimate_effects(&d, &y).unwrap().get(a)
            })
            .sum::<f64>()
            / reps as f64;
        let tol = 3.0 * (1.0 / (16.0 * reps as f64)).sqrt();
        assert!(mean.abs() < tol, "mean {mean} tol {tol}");
    }

    #[test]
    fn single_dispersion_effect_inflates_estimate_variance() {
        let d = build_design(4).unwrap();
        let m = model_a(9.0);
        let reps = 10_000u64;
        let c = EffectId::parse("BCD", 4).unwrap();
        let xs: Vec<f64> = (0..reps)
            .map(|r| {
                let y = generate_response(&d, &m, SeedSpec::new(5, r)).unwrap();
                estimate_effects(&d, &y).unwrap().get(c)
            })
            .collect();
        let mu = xs.iter().sum::<f64>() / reps as f64;
        let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let want = (3.0 + 1.0 / 3.0) / 32.0;
        assert!((var / want - 1.0).abs() < 0.05, "var {var} want {want}");
    }

    #[test]
    fn standardized_residuals_pass_ks() {
        let d = build_design(4).unwrap();
        let m = model_a(25.0);
        let sampler = ResponseSampler::new(&d, &m).unwrap();
        let mut z: Vec<f64> = (0..625u64)
            .flat_map(|r| {
                let y = sampler.sample(SeedSpec::new(9, r));
                y.iter()
                    .zip(sampler.mean())
                    .zip(sampler.sd())
                    .map(|((y, mu), s)| (y - mu) / s)
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(z.len(), 10_000);
        z.sort_by(f64::total_cmp);
        let norm = Normal::standard();
        let nf = z.len() as f64;
        let ks = z
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = norm.cdf(x);
                (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
            })
            .fold(0.0, f64::max);
        // asymptotic 1% critical value
        assert!(ks < 1.628 / nf.sqrt(), "KS statistic {ks}");
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let d = build_design(4).unwrap();
        let m = ScenarioModel::null(4, 1.0).unwrap();
        let reps = 10_000u64;
        let pairs: Vec<(f64, f64)> = (0..reps)
            .map(|r| {
                let a = generate_response(&d, &m, SeedSpec::new(11, 2 * r)).unwrap();
                let b = generate_response(&d, &m, SeedSpec::new(11, 2 * r + 1)).unwrap();
                (a[0], b[0])
            })
            .collect();
        let n = reps as f64;
        let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        let r = sxy / (sxx * syy).sqrt();
        assert!(r.abs() < 0.02, "cross-stream correlation {r}");
    }
}
