use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::Sig9;
use crate::model::SystemSpec;

/// Upper end of the flop search.
pub const MAX_NFLOP: u32 = 1 << 16;

/// Relative slack when comparing measured traffic against a stored peak, so
/// the peak configuration itself always reaches 100%.
const PEAK_SLACK: f64 = 1e-9;

/// Flops per element needed for each LoI level (percent).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoICalibration {
    pub threads: u32,
    #[serde(rename = "levels")]
    pub entries: BTreeMap<u32, u32>,
    pub peak_traffic_bytes_per_s: Sig9,
}

impl LoICalibration {
    /// `None` for level 0: the injector stays idle.
    pub fn nflop_for(&self, level: u32) -> Option<u32> {
        self.entries.get(&level).copied()
    }

    /// Higher LoI never needs more flops per element.
    pub fn is_monotone(&self) -> bool {
        self.entries
            .values()
            .zip(self.entries.values().skip(1))
            .all(|(a, b)| b <= a)
    }
}

/// For each level, the largest flop count whose traffic still reaches
/// `level`% of the system's peak LoI traffic.
///
/// `traffic` maps `(nflop, threads)` to bytes/s; it can be the analytic
/// model or a hardware measurement and is assumed non-increasing in `nflop`.
/// Each flop count is evaluated at most once.
pub fn calibrate_loi<F>(
    s: &SystemSpec,
    levels: &[u32],
    threads: u32,
    mut traffic: F,
) -> Result<LoICalibration>
where
    F: FnMut(u32, u32) -> f64,
{
    if threads < 1 {
        return Err(Error::invalid("calibration needs at least one thread"));
    }
    if let Some(bad) = levels.iter().find(|&&l| l > 100) {
        return Err(Error::invalid(format!("LoI level {bad} outside [0, 100]")));
    }
    let peak = s.peak_loi_traffic_bytes_per_s;
    let mut seen: BTreeMap<u32, f64> = BTreeMap::new();
    let mut eval = |n: u32| *seen.entry(n).or_insert_with(|| traffic(n, threads));

    let max_traffic = eval(1);
    let max_attainable = ((100.0 * max_traffic / peak) * (1.0 + PEAK_SLACK))
        .floor()
        .min(100.0) as u32;

    let mut entries = BTreeMap::new();
    for &level in levels {
        if level == 0 {
            continue;
        }
        let target = level as f64 / 100.0 * peak * (1.0 - PEAK_SLACK);
        if max_traffic < target {
            return Err(Error::UnreachableLevel {
                level,
                threads,
                max_attainable,
            });
        }
        // gallop to bracket the crossing, then bisect
        let mut lo = 1u32;
        let mut hi = 2u32;
        loop {
            if hi > MAX_NFLOP {
                hi = MAX_NFLOP + 1;
                break;
            }
            if eval(hi) < target {
                break;
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if eval(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        entries.insert(level, lo);
    }

    let cal = LoICalibration {
        threads,
        entries,
        peak_traffic_bytes_per_s: Sig9(peak),
    };
    if !cal.is_monotone() {
        return Err(Error::invalid(
            "traffic measurements are not monotone in flops per element",
        ));
    }
    Ok(cal)
}
