use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use crate::commands::usage;
use memtier_core::{AppModel, PhaseProfile, SystemSpec};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn system(path: Option<&PathBuf>) -> Result<SystemSpec> {
    let path =
        path.ok_or_else(|| usage("no system description: pass --system or set MEMTIER_SYSTEM"))?;
    let text = read(path)?;
    SystemSpec::from_json(&text)
        .with_context(|| format!("invalid system description {}", path.display()))
}

pub fn app(path: &Path) -> Result<AppModel> {
    let text = read(path)?;
    AppModel::from_json(&text)
        .with_context(|| format!("invalid application model {}", path.display()))
}

pub fn apps(paths: &[PathBuf]) -> Result<Vec<AppModel>> {
    paths.iter().map(|p| app(p)).collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PhaseDoc {
    List(Vec<PhaseProfile>),
    App(AppModel),
}

/// Phase list, either a bare JSON array or the phases of an application model.
pub fn phases(path: &Path) -> Result<Vec<PhaseProfile>> {
    let text = read(path)?;
    let phases = match serde_json::from_str::<PhaseDoc>(&text) {
        Ok(PhaseDoc::List(p)) => p,
        Ok(PhaseDoc::App(a)) => a.validate()?.phases,
        Err(_) => {
            // re-parse as a list for a precise message
            serde_json::from_str::<Vec<PhaseProfile>>(&text)
                .with_context(|| format!("invalid phase file {}", path.display()))?
        }
    };
    if phases.is_empty() {
        return Err(usage(format!("{} contains no phases", path.display())));
    }
    for p in &phases {
        p.validate()?;
    }
    Ok(phases)
}

/// Integer levels from `a..b` (step 10), `a..b:step` or `a,b,c`.
pub fn levels(spec: &str) -> Result<Vec<u32>> {
    let bad = || {
        usage(format!(
            "malformed level list {spec:?}; expected a..b, a..b:step or a,b,c"
        ))
    };
    let spec = spec.trim();
    if let Some((range, step)) = spec.split_once("..").map(|(a, rest)| {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "10"));
        ((a, b), step)
    }) {
        let lo: u32 = range.0.trim().parse().map_err(|_| bad())?;
        let hi: u32 = range.1.trim().parse().map_err(|_| bad())?;
        let step: u32 = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step as usize).collect());
    }
    let out: Vec<u32> = spec
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Percent range `lo..hi`.
pub fn percent_range(spec: &str) -> Result<(f64, f64)> {
    let bad = || {
        usage(format!(
            "malformed range {spec:?}; expected lo..hi in percent"
        ))
    };
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}
