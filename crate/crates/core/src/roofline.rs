//! Roofline model `P = min(F, B * I)` and its multi-tier extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct RooflinePoint {
    pub label: String,
    pub intensity_flops_per_byte: f64,
    pub throughput_flops_per_s: f64,
}

impl RooflinePoint {
    pub fn new(label: impl Into<String>, intensity: f64, throughput: f64) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::invalid("roofline intensity must be positive"));
        }
        if !(throughput >= 0.0 && throughput.is_finite()) {
            return Err(Error::invalid("roofline throughput must be non-negative"));
        }
        Ok(Self {
            label: label.into(),
            intensity_flops_per_byte: intensity,
            throughput_flops_per_s: throughput,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    MemoryBound,
    ComputeBound,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::MemoryBound => "memory_bound",
            Bound::ComputeBound => "compute_bound",
        }
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

/// Attainable flop rate at intensity `intensity` under peak compute
/// `peak_flops` and bandwidth `bandwidth`.
pub fn attainable(peak_flops: f64, bandwidth: f64, intensity: f64) -> Result<f64> {
    require_positive("peak flops", peak_flops)?;
    require_positive("bandwidth", bandwidth)?;
    require_positive("intensity", intensity)?;
    Ok(peak_flops.min(bandwidth * intensity))
}

pub fn ridge_point(peak_flops: f64, bandwidth: f64) -> f64 {
    peak_flops / bandwidth
}

/// Aggregate bandwidth when both tiers are used concurrently.
pub fn multi_tier_bandwidth(s: &SystemSpec) -> f64 {
    s.local.bandwidth_bytes_per_s + s.remote.bandwidth_bytes_per_s
}

/// Aggregate bandwidth left when background traffic occupies a fraction
/// `loi` of the pool; local DRAM is unaffected.
pub fn interference_adjusted_bandwidth(s: &SystemSpec, loi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&loi) {
        return Err(Error::invalid(format!("LoI {loi} outside [0, 1]")));
    }
    Ok(s.local.bandwidth_bytes_per_s + s.remote.bandwidth_bytes_per_s * (1.0 - loi))
}

/// Memory bound strictly left of the ridge point; the ridge itself counts
/// as compute bound.
pub fn classify_phase(point: &RooflinePoint, peak_flops: f64, bandwidth: f64) -> Bound {
    if point.intensity_flops_per_byte < ridge_point(peak_flops, bandwidth) {
        Bound::MemoryBound
    } else {
        Bound::ComputeBound
    }
}

/// `count` intensities spaced evenly in log10 between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    require_positive("grid start", lo)?;
    require_positive("grid end", hi)?;
    if count < 2 || hi <= lo {
        return Err(Error::invalid("grid needs at least two points and hi > lo"));
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)
            }
        })
        .collect())
}
