use serde::{Deserialize, Serialize};

use super::{bytes_per_element, flops_per_element, KernelConfig};
use crate::error::{Error, Result};
use crate::model::SystemSpec;

/// Thread count of the configuration that defines 100% LoI (with one flop
/// per element).
pub const PEAK_THREADS: u32 = 12;

/// Per-core limits of the analytic kernel model.
///
/// Each element costs a streaming part, `bytes / min(pool_bw / threads,
/// per_thread_bandwidth)`, followed by the dependent flop chain,
/// `flops / per_core_flops`. The two parts are serialized because every
/// flop in the chain depends on the element just loaded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficModel {
    pub per_core_flops: f64,
    /// Streaming rate one core sustains against the pool on its own.
    pub per_thread_bandwidth: f64,
    /// Count the read-for-ownership fill of the store (24 B per element).
    #[serde(default)]
    pub count_rfo: bool,
}

impl TrafficModel {
    /// Parameters matching the dual-socket emulation testbed: two threads
    /// reach about half of the peak LoI traffic.
    pub const TESTBED: TrafficModel = TrafficModel {
        per_core_flops: 8e9,
        per_thread_bandwidth: 9e9,
        count_rfo: false,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("per_core_flops", self.per_core_flops),
            ("per_thread_bandwidth", self.per_thread_bandwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::field(name, "must be positive"));
            }
        }
        Ok(())
    }
}

impl Default for TrafficModel {
    fn default() -> Self {
        Self::TESTBED
    }
}

/// Link traffic, bytes/s, the kernel configuration is expected to generate.
pub fn predict_traffic(cfg: &KernelConfig, s: &SystemSpec, model: &TrafficModel) -> Result<f64> {
    model.validate()?;
    if cfg.threads < 1 {
        return Err(Error::field("threads", "must be at least 1"));
    }
    let bytes = bytes_per_element(model.count_rfo) as f64;
    let flops = flops_per_element(cfg.nflop)? as f64;
    let threads = cfg.threads as f64;
    let share = (s.pool_bandwidth() / threads).min(model.per_thread_bandwidth);
    let per_element = bytes / share + flops / model.per_core_flops;
    Ok((threads * bytes / per_element).min(s.link_traffic_capacity_bytes_per_s))
}

/// Traffic of the peak configuration: one flop per element on
/// [`PEAK_THREADS`] threads.
pub fn peak_loi_traffic(s: &SystemSpec, model: &TrafficModel) -> Result<f64> {
    let cfg = KernelConfig::new(1, PEAK_THREADS, 1, 1)?;
    predict_traffic(&cfg, s, model)
}
