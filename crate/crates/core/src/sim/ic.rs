use super::{app_runtime, contention_factor, phase_runtime, ContentionParams};
use crate::error::{Error, Result};
use crate::lbench::{predict_traffic, KernelConfig, TrafficModel};
use crate::model::{AppModel, PhaseProfile, SystemSpec};

/// Link demand of the IC probe: the kernel on one thread with one flop
/// per element.
pub fn probe_demand(s: &SystemSpec, probe: &TrafficModel) -> Result<f64> {
    let cfg = KernelConfig::new(1, 1, 1, 1)?;
    Ok(predict_traffic(&cfg, s, probe)?.min(s.pool_bandwidth()))
}

/// Probe slowdown while the phase's remote traffic shares the link.
pub fn phase_ic(
    p: &PhaseProfile,
    s: &SystemSpec,
    cp: &ContentionParams,
    probe: &TrafficModel,
) -> Result<f64> {
    p.validate()?;
    let link = s.link_data_capacity_bytes_per_s;
    let d_probe = probe_demand(s, probe)?;
    let d_app = p.remote_rate();
    let offered = d_probe + d_app;
    let rate = if offered > link {
        link * d_probe / offered
    } else {
        d_probe
    };
    let corun = contention_factor(offered, link, cp)? / rate;
    let idle = contention_factor(d_probe, link, cp)? / d_probe;
    Ok(corun / idle)
}

/// Application IC: phase ICs weighted by each phase's share of the idle
/// runtime.
pub fn predict_ic(
    app: &AppModel,
    s: &SystemSpec,
    cp: &ContentionParams,
    probe: &TrafficModel,
) -> Result<f64> {
    let total = app_runtime(app, s, 0.0, cp)?;
    if total <= 0.0 {
        return Err(Error::Undefined(
            "interference coefficient",
            format!("application {} does no work", app.name),
        ));
    }
    app.weighted_phases()
        .map(|(w, p)| Ok(w * phase_runtime(p, s, 0.0, cp)? / total * phase_ic(p, s, cp, probe)?))
        .sum()
}
