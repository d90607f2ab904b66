//! The interference kernel, its analytic traffic model and LoI calibration.
//!
//! The kernel streams over an array of doubles placed on the memory pool.
//! Each element is loaded once, pushed through a configurable number of flops
//! and written back, so the flop count per element dials the link traffic
//! the kernel generates.

mod calibrate;
mod kernel;
pub mod placement;
mod traffic;

pub use calibrate::{calibrate_loi, LoICalibration, MAX_NFLOP};
pub use kernel::{
    run_kernel, run_kernel_from, KernelConfig, KernelRun, ALPHA_DECAY, INITIAL_ALPHA, INITIAL_BETA,
};
pub use placement::{PlacedBuffer, Placement};
pub use traffic::{peak_loi_traffic, predict_traffic, TrafficModel, PEAK_THREADS};

use crate::error::{Error, Result};

/// Flops executed per element: one add when `nflop` is odd, plus
/// `nflop / 2` multiply-adds at two flops each.
pub fn flops_per_element(nflop: u32) -> Result<u32> {
    if nflop < 1 {
        return Err(Error::invalid("nflop must be at least 1"));
    }
    let add = nflop % 2;
    let multiply_adds = nflop / 2;
    Ok(add + 2 * multiply_adds)
}

/// Bytes moved per element and trial: an 8-byte load and an 8-byte
/// writeback, plus the read-for-ownership fill when `count_rfo` is set.
pub fn bytes_per_element(count_rfo: bool) -> u32 {
    let f64_bytes = std::mem::size_of::<f64>() as u32;
    if count_rfo {
        3 * f64_bytes
    } else {
        2 * f64_bytes
    }
}

/// Runtime of the probe under co-location relative to an idle system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferenceCoefficient(pub f64);

impl InterferenceCoefficient {
    /// Below 1 only through measurement noise; reported, never clamped.
    pub fn below_idle(&self) -> bool {
        self.0 < 1.0
    }
}

pub fn interference_coefficient(t_corun: f64, t_idle: f64) -> Result<InterferenceCoefficient> {
    if !(t_idle > 0.0 && t_idle.is_finite()) {
        return Err(Error::invalid("idle runtime must be positive"));
    }
    if !(t_corun >= 0.0 && t_corun.is_finite()) {
        return Err(Error::invalid("co-run runtime must be non-negative"));
    }
    let ic = InterferenceCoefficient(t_corun / t_idle);
    if ic.below_idle() {
        log::warn!(
            "interference coefficient {:.4} is below 1 (co-run faster than idle); likely measurement noise",
            ic.0
        );
    }
    Ok(ic)
}
