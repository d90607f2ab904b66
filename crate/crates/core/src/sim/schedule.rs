use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use super::{app_runtime, check_loi, phase_runtime, ContentionParams};
use crate::error::{Error, Result};
use crate::format::Sig9;
use crate::model::{AppModel, SystemSpec};

/// Piecewise-constant background interference.
#[derive(Clone, Debug, PartialEq)]
pub struct LoISchedule {
    /// `(duration_s, loi)` with `loi` a fraction of the peak LoI traffic.
    segments: Vec<(f64, f64)>,
}

impl LoISchedule {
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        for &(d, loi) in &segments {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::invalid(format!(
                    "segment duration {d} must be positive"
                )));
            }
            check_loi(loi)?;
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.0).sum()
    }

    /// Runtime of `app` with its phases run back to back under this
    /// schedule. Phase `i` carries `w_i * T_i(loi)` seconds of work at each
    /// interference level, integrated segment by segment.
    pub fn run(&self, app: &AppModel, s: &SystemSpec, cp: &ContentionParams) -> Result<f64> {
        let mut segments = self.segments.iter().copied();
        let (mut left, mut loi) = segments
            .next()
            .ok_or_else(|| Error::invalid("empty LoI schedule"))?;
        let mut elapsed = 0.0;
        for (w, phase) in app.weighted_phases() {
            // fraction of the phase still to run
            let mut todo = 1.0;
            loop {
                let full = w * phase_runtime(phase, s, loi, cp)?;
                let need = todo * full;
                if need <= left {
                    elapsed += need;
                    left -= need;
                    break;
                }
                todo -= left / full;
                elapsed += left;
                (left, loi) = segments
                    .next()
                    .ok_or_else(|| Error::invalid("LoI schedule ends before the application"))?;
            }
        }
        Ok(elapsed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Interference-inducing jobs may be co-located freely.
    Baseline,
    /// Co-location is restricted, capping the background LoI.
    Aware,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Baseline => "baseline",
            Policy::Aware => "aware",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleExperimentConfig {
    /// LoI range in percent.
    pub baseline_range: (f64, f64),
    pub aware_range: (f64, f64),
    pub period_s: f64,
    pub runs: u32,
    pub seed: u64,
}

impl ScheduleExperimentConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            baseline_range: (0.0, 50.0),
            aware_range: (0.0, 20.0),
            period_s: 60.0,
            runs: 100,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("baseline_range", self.baseline_range),
            ("aware_range", self.aware_range),
        ] {
            if !(0.0 <= lo && lo <= hi && hi <= 100.0) {
                return Err(Error::field(name, format!("invalid range {lo}..{hi}")));
            }
        }
        let (b, a) = (self.baseline_range, self.aware_range);
        if a.0 < b.0 || a.1 > b.1 {
            return Err(Error::field(
                "aware_range",
                "must lie within baseline_range",
            ));
        }
        if !(self.period_s > 0.0 && self.period_s.is_finite()) {
            return Err(Error::field("period_s", "must be positive"));
        }
        if self.runs < 1 {
            return Err(Error::field("runs", "must be at least 1"));
        }
        Ok(())
    }

    fn range(&self, policy: Policy) -> (f64, f64) {
        match policy {
            Policy::Baseline => self.baseline_range,
            Policy::Aware => self.aware_range,
        }
    }
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = q * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    match sorted.get(i + 1) {
        Some(&next) => sorted[i] + (h - i as f64) * (next - sorted[i]),
        None => sorted[i],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RuntimeStats {
    pub min: Sig9,
    pub p25: Sig9,
    pub median: Sig9,
    pub p75: Sig9,
    pub max: Sig9,
    pub mean: Sig9,
}

impl RuntimeStats {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no runtimes to summarize"));
        }
        let mut v = samples.to_vec();
        v.sort_by(f64::total_cmp);
        Ok(Self {
            min: Sig9(v[0]),
            p25: Sig9(percentile(&v, 0.25)),
            median: Sig9(percentile(&v, 0.5)),
            p75: Sig9(percentile(&v, 0.75)),
            max: Sig9(v[v.len() - 1]),
            mean: Sig9(samples.iter().sum::<f64>() / samples.len() as f64),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppSummary {
    pub app: String,
    pub baseline: RuntimeStats,
    pub aware: RuntimeStats,
    /// `mean_baseline / mean_aware - 1`.
    pub speedup: Sig9,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub app: String,
    pub policy: Policy,
    pub run: u32,
    pub runtime_s: Sig9,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub apps: Vec<AppSummary>,
    /// Every run, ordered by app (input order), policy, run index.
    #[serde(skip)]
    pub runs: Vec<RunRecord>,
}

const POLICIES: [Policy; 2] = [Policy::Baseline, Policy::Aware];

fn run_seed(seed: u64, app: usize, run: u32) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    seed ^ (((app as u64) << 32) | run as u64).wrapping_mul(GOLDEN)
}

/// Runs every app `cfg.runs` times under each policy.
///
/// Run `r` of app `a` draws one stream of uniforms from a generator seeded
/// by `(seed, a, r)`; both policies map the same uniforms onto their own
/// ranges, so the aware schedule never exceeds the baseline one.
pub fn scheduler_experiment(
    apps: &[AppModel],
    s: &SystemSpec,
    cfg: &ScheduleExperimentConfig,
    cp: &ContentionParams,
) -> Result<ExperimentResult> {
    if apps.is_empty() {
        return Err(Error::invalid(
            "scheduler experiment needs at least one application",
        ));
    }
    cfg.validate()?;
    cp.validate()?;
    let mut result = ExperimentResult {
        apps: Vec::new(),
        runs: Vec::new(),
    };
    for (ai, app) in apps.iter().enumerate() {
        // the slowest possible run fixes how many segments to draw
        let longest = app_runtime(app, s, cfg.baseline_range.1 / 100.0, cp)?;
        let segments = (longest / cfg.period_s).ceil() as usize + 2;
        let mut samples = [Vec::new(), Vec::new()];
        for run in 0..cfg.runs {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(run_seed(cfg.seed, ai, run));
            let draws: Vec<f64> = (0..segments).map(|_| rng.random::<f64>()).collect();
            for (slot, policy) in POLICIES.into_iter().enumerate() {
                let (lo, hi) = cfg.range(policy);
                let schedule = LoISchedule::new(
                    draws
                        .iter()
                        .map(|u| (cfg.period_s, (lo + u * (hi - lo)) / 100.0))
                        .collect(),
                )?;
                samples[slot].push(schedule.run(app, s, cp)?);
            }
        }
        for (policy, times) in POLICIES.into_iter().zip(&samples) {
            result
                .runs
                .extend(times.iter().zip(0..).map(|(&t, run)| RunRecord {
                    app: app.name.clone(),
                    policy,
                    run,
                    runtime_s: Sig9(t),
                }));
        }
        let baseline = RuntimeStats::from_samples(&samples[0])?;
        let aware = RuntimeStats::from_samples(&samples[1])?;
        result.apps.push(AppSummary {
            app: app.name.clone(),
            speedup: Sig9(baseline.mean.0 / aware.mean.0 - 1.0),
            baseline,
            aware,
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::testbed;
    use crate::model::PhaseProfile;

    const CP: ContentionParams = ContentionParams::calibrated();

    fn system() -> SystemSpec {
        let mut s = testbed(64, 64);
        s.peak_loi_traffic_bytes_per_s = 33e9;
        s
    }

    fn app(name: &str, remote: f64) -> AppModel {
        AppModel {
            name: name.into(),
            footprint_bytes: 1,
            phases: vec![
                PhaseProfile::new("a", 100.0, 1e12, 73e11, remote * 34e11),
                PhaseProfile::new("b", 200.0, 1e12, 146e11, 0.0),
            ],
            weight_per_phase: vec![0.5, 0.5],
        }
    }

    #[test]
    fn type7_percentiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 0.25), 1.75);
        assert_eq!(percentile(&v, 0.5), 2.5);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert_eq!(percentile(&[7.0], 0.75), 7.0);
    }

    #[test]
    fn constant_schedule_matches_app_runtime() {
        let s = system();
        let a = app("x", 0.3);
        for loi in [0.0, 0.25, 0.5] {
            let sched = LoISchedule::new(vec![(1e6, loi)]).unwrap();
            let t = sched.run(&a, &s, &CP).unwrap();
            let expect = app_runtime(&a, &s, loi, &CP).unwrap();
            assert!((t - expect).abs() <= 1e-9 * expect);
        }
    }

    #[test]
    fn segments_integrate_piecewise() {
        let s = system();
        let a = AppModel {
            name: "one".into(),
            footprint_bytes: 1,
            phases: vec![PhaseProfile::new("p", 100.0, 0.0, 0.0, 17e11)],
            weight_per_phase: vec![1.0],
        };
        let (t0, t1) = (
            phase_runtime(&a.phases[0], &s, 0.0, &CP).unwrap(),
            phase_runtime(&a.phases[0], &s, 1.0, &CP).unwrap(),
        );
        // half the work at idle, the rest under full load
        let sched = LoISchedule::new(vec![(t0 / 2.0, 0.0), (1e9, 1.0)]).unwrap();
        let t = sched.run(&a, &s, &CP).unwrap();
        assert!((t - (t0 / 2.0 + t1 / 2.0)).abs() < 1e-9 * t);
        assert!(LoISchedule::new(vec![(1.0, 0.0)])
            .unwrap()
            .run(&a, &s, &CP)
            .is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(LoISchedule::new(vec![(0.0, 0.1)]).is_err());
        assert!(LoISchedule::new(vec![(1.0, 1.1)]).is_err());
        let mut cfg = ScheduleExperimentConfig::new(1);
        assert!(cfg.validate().is_ok());
        cfg.aware_range = (0.0, 60.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn experiment_is_deterministic_and_dominated() {
        let s = system();
        let apps = [app("busy", 0.4), app("quiet", 0.0)];
        let mut cfg = ScheduleExperimentConfig::new(7);
        cfg.runs = 20;
        let r1 = scheduler_experiment(&apps, &s, &cfg, &CP).unwrap();
        let r2 = scheduler_experiment(&apps, &s, &cfg, &CP).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.runs.len(), 80);
        let busy = &r1.apps[0];
        assert!(busy.aware.mean.0 <= busy.baseline.mean.0);
        assert!(busy.speedup.0 > 0.0);
        assert_eq!(r1.apps[1].speedup.0, 0.0);
        for pair in r1
            .runs
            .iter()
            .filter(|r| r.app == "busy")
            .collect::<Vec<_>>()
            .chunks(20)
        {
            assert!(pair.iter().all(|r| r.runtime_s.0 > 0.0));
        }
        cfg.seed = 8;
        assert_ne!(scheduler_experiment(&apps, &s, &cfg, &CP).unwrap(), r1);
        assert!(scheduler_experiment(&[], &s, &cfg, &CP).is_err());
    }

    #[test]
    fn aware_never_slower_run_by_run() {
        let s = system();
        let apps = [app("busy", 0.9)];
        let mut cfg = ScheduleExperimentConfig::new(3);
        cfg.runs = 30;
        let r = scheduler_experiment(&apps, &s, &cfg, &CP).unwrap();
        let (base, aware): (Vec<_>, Vec<_>) =
            r.runs.iter().partition(|x| x.policy == Policy::Baseline);
        for (b, a) in base.iter().zip(&aware) {
            assert_eq!(b.run, a.run);
            assert!(a.runtime_s.0 <= b.runtime_s.0 * (1.0 + 1e-12));
        }
    }
}
