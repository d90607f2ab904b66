//! Quantitative analysis of application behavior on tiered and pool-based
//! disaggregated memory systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: tier/system descriptions, phase profiles and application models.
//! * [`ingest`]: recorded access samples and counter streams.
//! * [`curves`]: the bandwidth-capacity scaling curve.
//! * [`metrics`]: prefetch accuracy/coverage, arithmetic intensity, tier ratios.
//! * [`roofline`]: single and multi-tier roofline models.
//! * [`lbench`]: the interference kernel, its traffic model and LoI calibration.
//! * [`sim`]: memory-pool contention simulator and the scheduling experiment.

pub mod curves;
pub mod error;
pub mod format;
pub mod ingest;
pub mod lbench;
pub mod metrics;
pub mod model;
pub mod roofline;
pub mod sim;

pub use error::{Error, FieldError, Result};
pub use model::{AppModel, PhaseProfile, SystemSpec, Tier, TierSpec};
