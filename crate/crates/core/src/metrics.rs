//! Prefetch effectiveness, arithmetic intensity and tier ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::Sig9;
use crate::model::{PhaseProfile, SystemSpec};

/// L2 prefetch counters of one phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrefetchCounters {
    pub pf_l2_data_rd: u64,
    pub pf_l2_rfo: u64,
    pub l2_lines_in: u64,
    pub useless_hwpf: u64,
}

impl PrefetchCounters {
    pub const EVENTS: [&'static str; 4] =
        ["PF_L2_DATA_RD", "PF_L2_RFO", "L2_LINES_IN", "USELESS_HWPF"];

    pub fn new(pf_l2_data_rd: u64, pf_l2_rfo: u64, l2_lines_in: u64, useless_hwpf: u64) -> Self {
        Self {
            pf_l2_data_rd,
            pf_l2_rfo,
            l2_lines_in,
            useless_hwpf,
        }
    }

    pub fn prefetched(&self) -> u64 {
        self.pf_l2_data_rd + self.pf_l2_rfo
    }

    pub fn validate(&self) -> Result<()> {
        if self.useless_hwpf > self.prefetched() {
            return Err(Error::field(
                "useless_hwpf",
                "exceeds PF_L2_DATA_RD + PF_L2_RFO",
            ));
        }
        if self.useless_hwpf > self.l2_lines_in {
            return Err(Error::field("useless_hwpf", "exceeds L2_LINES_IN"));
        }
        Ok(())
    }
}

/// Fraction of prefetched lines that were used.
pub fn prefetch_accuracy(c: &PrefetchCounters) -> Result<f64> {
    c.validate()?;
    let issued = c.prefetched();
    if issued == 0 {
        return Err(Error::Undefined(
            "accuracy",
            "no prefetches were issued".into(),
        ));
    }
    Ok((issued - c.useless_hwpf) as f64 / issued as f64)
}

/// Fraction of useful incoming L2 lines that arrived by prefetch.
pub fn prefetch_coverage(c: &PrefetchCounters) -> Result<f64> {
    c.validate()?;
    if c.l2_lines_in <= c.useless_hwpf {
        return Err(Error::Undefined(
            "coverage",
            "L2_LINES_IN does not exceed USELESS_HWPF".into(),
        ));
    }
    let useful = c.prefetched() - c.useless_hwpf;
    Ok(useful as f64 / (c.l2_lines_in - c.useless_hwpf) as f64)
}

/// Relative extra memory traffic caused by prefetching. Negative when
/// prefetching reduces traffic.
pub fn excess_traffic(traffic_pf_on: f64, traffic_pf_off: f64) -> Result<f64> {
    if !(traffic_pf_off > 0.0 && traffic_pf_off.is_finite()) {
        return Err(Error::invalid("baseline traffic must be positive"));
    }
    if !traffic_pf_on.is_finite() {
        return Err(Error::invalid("traffic must be finite"));
    }
    Ok(traffic_pf_on / traffic_pf_off - 1.0)
}

fn total_bytes(p: &PhaseProfile) -> Result<f64> {
    let total = p.total_bytes();
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::Undefined(
            "ratio",
            format!("phase {:?} moved no bytes", p.tag),
        ))
    }
}

/// Flops per byte moved from all tiers.
pub fn arithmetic_intensity(p: &PhaseProfile) -> Result<f64> {
    Ok(p.flops / total_bytes(p)?)
}

pub fn remote_access_ratio(p: &PhaseProfile) -> Result<f64> {
    Ok(p.bytes_remote / total_bytes(p)?)
}

/// Complement of [`remote_access_ratio`]; the two always sum to exactly 1.
pub fn local_access_ratio(p: &PhaseProfile) -> Result<f64> {
    Ok(1.0 - remote_access_ratio(p)?)
}

/// Share of total capacity held by the remote tier.
pub fn capacity_ratio(s: &SystemSpec) -> Result<f64> {
    let total = s.total_capacity_bytes();
    if total == 0 {
        return Err(Error::Undefined(
            "capacity ratio",
            "total capacity is zero".into(),
        ));
    }
    Ok(s.remote.capacity_bytes as f64 / total as f64)
}

/// Share of aggregate bandwidth provided by the remote tier.
pub fn bandwidth_ratio(s: &SystemSpec) -> f64 {
    let r = s.remote.bandwidth_bytes_per_s;
    r / (s.local.bandwidth_bytes_per_s + r)
}

/// Where a phase's remote access ratio sits relative to the tuning band
/// `[r_cap, r_bw]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandClass {
    BelowBand,
    WithinBand,
    AboveBand,
    /// `r_cap > r_bw`: the band is inverted and the tiers are ill-balanced.
    IllBalanced,
}

impl BandClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BandClass::BelowBand => "below_band",
            BandClass::WithinBand => "within_band",
            BandClass::AboveBand => "above_band",
            BandClass::IllBalanced => "ill_balanced",
        }
    }

    /// Classification from the three ratios alone. Band edges are inclusive.
    ///
    /// Access below both references is under-use of the remote tier whatever
    /// the band's shape; otherwise an inverted band (`r_cap > r_bw`) marks the
    /// tiers as ill-balanced.
    pub fn classify(r_access: f64, r_cap: f64, r_bw: f64) -> Self {
        if r_access < r_cap.min(r_bw) {
            BandClass::BelowBand
        } else if r_cap > r_bw {
            BandClass::IllBalanced
        } else if r_access > r_bw {
            BandClass::AboveBand
        } else {
            BandClass::WithinBand
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TieringReport {
    pub phase: String,
    pub r_access: f64,
    pub r_cap: f64,
    pub r_bw: f64,
    pub classification: BandClass,
}

impl TieringReport {
    pub fn to_json_row(&self) -> TieringRow<'_> {
        TieringRow {
            phase: &self.phase,
            r_access: Sig9(self.r_access),
            r_cap: Sig9(self.r_cap),
            r_bw: Sig9(self.r_bw),
            classification: self.classification,
        }
    }
}

/// Serialized shape of a [`TieringReport`].
#[derive(Serialize)]
pub struct TieringRow<'a> {
    pub phase: &'a str,
    pub r_access: Sig9,
    pub r_cap: Sig9,
    pub r_bw: Sig9,
    pub classification: BandClass,
}

pub fn tiering_gap(p: &PhaseProfile, s: &SystemSpec) -> Result<TieringReport> {
    let r_access = remote_access_ratio(p)?;
    let r_cap = capacity_ratio(s)?;
    let r_bw = bandwidth_ratio(s);
    Ok(TieringReport {
        phase: p.tag.clone(),
        r_access,
        r_cap,
        r_bw,
        classification: BandClass::classify(r_access, r_cap, r_bw),
    })
}
