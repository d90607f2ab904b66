//! Domain types shared by every analysis: memory tiers, the two-tier pool
//! system, per-phase profiles and application models.
//!
//! Units are fixed crate-wide: bandwidths in bytes/s, durations in seconds,
//! latencies in nanoseconds, capacities in bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};

/// Which tier an access or a byte count belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Local,
    Remote,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Local => "local",
            Tier::Remote => "remote",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "local" => Ok(Tier::Local),
            "remote" => Ok(Tier::Remote),
            other => Err(format!("unknown tier {other:?}, expected local or remote")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSpec {
    pub name: String,
    pub capacity_bytes: u64,
    pub bandwidth_bytes_per_s: f64,
    pub latency_ns: f64,
}

impl TierSpec {
    fn check(&self, prefix: &str, out: &mut Vec<FieldError>) {
        positive(
            &format!("{prefix}.bandwidth_bytes_per_s"),
            self.bandwidth_bytes_per_s,
            out,
        );
        positive(&format!("{prefix}.latency_ns"), self.latency_ns, out);
    }
}

/// A compute node's local memory plus one fabric-attached memory pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub local: TierSpec,
    pub remote: TierSpec,
    /// Peak payload bandwidth of the link to the pool.
    pub link_data_capacity_bytes_per_s: f64,
    /// Peak raw link traffic, protocol overhead included.
    pub link_traffic_capacity_bytes_per_s: f64,
    pub peak_flops_per_s: f64,
    /// Link traffic of the interference kernel's peak configuration; LoI is
    /// expressed as a percentage of this.
    pub peak_loi_traffic_bytes_per_s: f64,
}

impl SystemSpec {
    /// Every violated invariant, one entry per problem.
    pub fn diagnostics(&self) -> Vec<FieldError> {
        let mut out = Vec::new();
        self.local.check("local", &mut out);
        self.remote.check("remote", &mut out);
        positive(
            "link_data_capacity_bytes_per_s",
            self.link_data_capacity_bytes_per_s,
            &mut out,
        );
        positive(
            "link_traffic_capacity_bytes_per_s",
            self.link_traffic_capacity_bytes_per_s,
            &mut out,
        );
        positive("peak_flops_per_s", self.peak_flops_per_s, &mut out);
        positive(
            "peak_loi_traffic_bytes_per_s",
            self.peak_loi_traffic_bytes_per_s,
            &mut out,
        );

        if self.link_traffic_capacity_bytes_per_s < self.link_data_capacity_bytes_per_s {
            out.push(FieldError::new(
                "link_traffic_capacity_bytes_per_s",
                "negative protocol overhead (traffic capacity below data capacity)",
            ));
        }
        if self.remote.bandwidth_bytes_per_s > self.link_data_capacity_bytes_per_s {
            out.push(FieldError::new(
                "remote.bandwidth_bytes_per_s",
                "remote bandwidth exceeds link data capacity",
            ));
        }
        if self.peak_loi_traffic_bytes_per_s > self.link_traffic_capacity_bytes_per_s {
            out.push(FieldError::new(
                "peak_loi_traffic_bytes_per_s",
                "peak LoI traffic exceeds link traffic capacity",
            ));
        }
        out
    }

    pub fn validate(self) -> Result<Self> {
        validate_system(self)
    }

    /// Parses a JSON document and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text)?;
        spec.validate()
    }

    pub fn total_capacity_bytes(&self) -> u64 {
        self.local
            .capacity_bytes
            .saturating_add(self.remote.capacity_bytes)
    }

    /// Bandwidth available to the pool: the remote tier behind the link.
    pub fn pool_bandwidth(&self) -> f64 {
        self.remote
            .bandwidth_bytes_per_s
            .min(self.link_data_capacity_bytes_per_s)
    }
}

/// Returns the spec unchanged iff every invariant holds.
pub fn validate_system(spec: SystemSpec) -> Result<SystemSpec> {
    let diags = spec.diagnostics();
    if diags.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Validation(diags))
    }
}

/// Aggregated counters of one execution phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseProfile {
    pub tag: String,
    pub duration_s: f64,
    pub flops: f64,
    pub bytes_local: f64,
    pub bytes_remote: f64,
    #[serde(default)]
    pub counters: BTreeMap<String, u64>,
}

impl PhaseProfile {
    pub fn new(
        tag: impl Into<String>,
        duration_s: f64,
        flops: f64,
        bytes_local: f64,
        bytes_remote: f64,
    ) -> Self {
        Self {
            tag: tag.into(),
            duration_s,
            flops,
            bytes_local,
            bytes_remote,
            counters: BTreeMap::new(),
        }
    }

    pub fn total_bytes(&self) -> f64 {
        self.bytes_local + self.bytes_remote
    }

    /// Average remote demand over the phase, bytes/s.
    pub fn remote_rate(&self) -> f64 {
        self.bytes_remote / self.duration_s
    }

    pub fn diagnostics(&self, prefix: &str) -> Vec<FieldError> {
        let mut out = Vec::new();
        positive(&format!("{prefix}.duration_s"), self.duration_s, &mut out);
        non_negative(&format!("{prefix}.flops"), self.flops, &mut out);
        non_negative(&format!("{prefix}.bytes_local"), self.bytes_local, &mut out);
        non_negative(
            &format!("{prefix}.bytes_remote"),
            self.bytes_remote,
            &mut out,
        );
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics(&format!("phase[{}]", self.tag));
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(d))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppModel {
    pub name: String,
    pub footprint_bytes: u64,
    pub phases: Vec<PhaseProfile>,
    /// Share of one run attributed to each phase profile; sums to 1.
    pub weight_per_phase: Vec<f64>,
}

impl AppModel {
    pub const WEIGHT_TOLERANCE: f64 = 1e-9;

    pub fn diagnostics(&self) -> Vec<FieldError> {
        let mut out = Vec::new();
        if self.footprint_bytes == 0 {
            out.push(FieldError::new("footprint_bytes", "must be positive"));
        }
        if self.phases.is_empty() {
            out.push(FieldError::new("phases", "at least one phase is required"));
        }
        if self.weight_per_phase.len() != self.phases.len() {
            out.push(FieldError::new(
                "weight_per_phase",
                format!(
                    "{} weights for {} phases",
                    self.weight_per_phase.len(),
                    self.phases.len()
                ),
            ));
        }
        for (i, w) in self.weight_per_phase.iter().enumerate() {
            if !w.is_finite() || !(0.0..=1.0).contains(w) {
                out.push(FieldError::new(
                    format!("weight_per_phase[{i}]"),
                    "must lie in [0, 1]",
                ));
            }
        }
        let sum: f64 = self.weight_per_phase.iter().sum();
        if (sum - 1.0).abs() > Self::WEIGHT_TOLERANCE {
            out.push(FieldError::new(
                "weight_per_phase",
                format!("weights sum to {sum}, expected 1"),
            ));
        }
        for (i, p) in self.phases.iter().enumerate() {
            out.extend(p.diagnostics(&format!("phases[{i}]")));
        }
        out
    }

    pub fn validate(self) -> Result<Self> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(self)
        } else {
            Err(Error::Validation(d))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let app: AppModel = serde_json::from_str(text)?;
        app.validate()
    }

    /// Phases paired with their weights.
    pub fn weighted_phases(&self) -> impl Iterator<Item = (f64, &PhaseProfile)> {
        self.weight_per_phase
            .iter()
            .copied()
            .zip(self.phases.iter())
    }

    pub fn has_remote_traffic(&self) -> bool {
        self.phases.iter().any(|p| p.bytes_remote > 0.0)
    }
}

fn positive(field: &str, v: f64, out: &mut Vec<FieldError>) {
    if !v.is_finite() {
        out.push(FieldError::new(field, "must be finite"));
    } else if v <= 0.0 {
        out.push(FieldError::new(field, "must be strictly positive"));
    }
}

fn non_negative(field: &str, v: f64, out: &mut Vec<FieldError>) {
    if !v.is_finite() {
        out.push(FieldError::new(field, "must be finite"));
    } else if v < 0.0 {
        out.push(FieldError::new(field, "must be non-negative"));
    }
}
