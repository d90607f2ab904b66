use serde::Serialize;

use super::{check_loi, contention_factor, ContentionParams};
use crate::error::{Error, Result};
use crate::format::Sig9;
use crate::model::{AppModel, PhaseProfile, SystemSpec};

/// Runtime of one phase while the injector runs at `bg_loi` (fraction of
/// the peak LoI traffic).
pub fn phase_runtime(
    p: &PhaseProfile,
    s: &SystemSpec,
    bg_loi: f64,
    cp: &ContentionParams,
) -> Result<f64> {
    check_loi(bg_loi)?;
    p.validate()?;
    let compute = p.flops / s.peak_flops_per_s;
    let local = p.bytes_local / s.local.bandwidth_bytes_per_s;
    if p.bytes_remote == 0.0 {
        return Ok(compute.max(local));
    }
    let link = s.link_data_capacity_bytes_per_s;
    let d_bg = bg_loi * s.peak_loi_traffic_bytes_per_s;
    let d_app = p.remote_rate();
    let offered = d_app + d_bg;
    let remote_bw = s.remote.bandwidth_bytes_per_s;
    // proportional share of an oversubscribed link, never above the tier itself
    let b_eff = if offered > link {
        remote_bw.min(link * d_app / offered)
    } else {
        remote_bw
    };
    let remote = contention_factor(offered, link, cp)? * p.bytes_remote / b_eff;
    Ok(compute.max(local).max(remote))
}

/// Weighted sum of phase runtimes.
pub fn app_runtime(
    app: &AppModel,
    s: &SystemSpec,
    bg_loi: f64,
    cp: &ContentionParams,
) -> Result<f64> {
    app.weighted_phases()
        .map(|(w, p)| phase_runtime(p, s, bg_loi, cp).map(|t| w * t))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityPoint {
    /// Fraction of the peak LoI traffic.
    pub level: f64,
    pub relative_performance: f64,
}

impl Serialize for SensitivityPoint {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("SensitivityPoint", 2)?;
        st.serialize_field("level", &Sig9(self.level))?;
        st.serialize_field("relative_performance", &Sig9(self.relative_performance))?;
        st.end()
    }
}

/// Relative performance `T(0) / T(level)` at each level, in input order.
pub fn sensitivity_curve(
    app: &AppModel,
    s: &SystemSpec,
    levels: &[f64],
    cp: &ContentionParams,
) -> Result<Vec<SensitivityPoint>> {
    if !levels.contains(&0.0) {
        return Err(Error::invalid("sensitivity levels must include 0"));
    }
    let base = app_runtime(app, s, 0.0, cp)?;
    if base <= 0.0 {
        return Err(Error::Undefined(
            "relative performance",
            format!("application {} does no work", app.name),
        ));
    }
    levels
        .iter()
        .map(|&level| {
            let relative_performance = if level == 0.0 {
                1.0
            } else {
                base / app_runtime(app, s, level, cp)?
            };
            Ok(SensitivityPoint {
                level,
                relative_performance,
            })
        })
        .collect()
}
