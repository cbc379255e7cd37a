//! Location-effect screening for unreplicated two-level factorial experiments,
//! with a Monte Carlo harness measuring how Lenth, Berk–Picard, Box–Meyer and
//! Loughin–Noble behave when multiplicative dispersion effects are present.

pub mod calibrate;
pub mod datagen;
pub mod design;
pub mod dispersion;
pub mod error;
pub mod experiment;
pub mod methods;
pub mod parallel;
pub mod report;
pub mod simstudy;

pub use datagen::{generate_response, SeedSpec};
pub use design::{build_design, estimate_effects, interaction_pairs, interaction_product, EffectEstimates, EffectId, FactorialDesign};
pub use error::{Error, Result};
pub use methods::{MethodConfig, MethodDecision, MethodKind};
pub use parallel::Executor;
