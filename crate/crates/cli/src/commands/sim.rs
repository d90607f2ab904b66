use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};

use super::lbench::ModelArgs;
use super::{finish, usage};
use crate::input;
use crate::report::{emit, to_json, Table};
use crate::svg::{Chart, Series, Style};
use crate::GlobalOpts;
use memtier_core::sim::{
    app_runtime, phase_ic, predict_ic, scheduler_experiment, sensitivity_curve, ContentionParams,
    ScheduleExperimentConfig,
};

#[derive(Subcommand, Debug)]
pub enum SimCommand {
    /// Relative performance of each application against background LoI.
    Sensitivity(SensitivityArgs),
    /// Interference each application (and each phase) inflicts on a probe.
    Ic(IcArgs),
    /// Baseline vs interference-aware co-location under random LoI.
    Schedule(ScheduleArgs),
}

#[derive(Args, Debug)]
pub struct ContentionArgs {
    #[arg(long, default_value_t = ContentionParams::calibrated().rho_max)]
    pub rho_max: f64,
    #[arg(long, default_value_t = ContentionParams::calibrated().queueing_exponent)]
    pub queueing_exponent: f64,
}

impl ContentionArgs {
    fn params(&self) -> Result<ContentionParams> {
        let p = ContentionParams {
            rho_max: self.rho_max,
            queueing_exponent: self.queueing_exponent,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug)]
pub struct SensitivityArgs {
    /// Application models (JSON).
    #[arg(required = true)]
    pub apps: Vec<PathBuf>,
    /// LoI levels in percent; must include 0.
    #[arg(long, default_value = "0..100:10")]
    pub levels: String,
    #[command(flatten)]
    pub contention: ContentionArgs,
}

#[derive(Args, Debug)]
pub struct IcArgs {
    #[arg(required = true)]
    pub apps: Vec<PathBuf>,
    #[command(flatten)]
    pub contention: ContentionArgs,
    #[command(flatten)]
    pub probe: ModelArgs,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[arg(required = true)]
    pub apps: Vec<PathBuf>,
    /// RNG seed; identical seeds give identical output.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub runs: u32,
    /// Seconds between LoI changes.
    #[arg(long, default_value_t = 60.0)]
    pub period: f64,
    /// LoI range (percent) without interference-aware placement.
    #[arg(long, default_value = "0..50")]
    pub baseline: String,
    /// LoI range (percent) with interference-aware placement.
    #[arg(long, default_value = "0..20")]
    pub aware: String,
    /// Also write every run's runtime as CSV.
    #[arg(long, value_name = "PATH")]
    pub runs_out: Option<PathBuf>,
    #[command(flatten)]
    pub contention: ContentionArgs,
}

pub fn run(g: &GlobalOpts, cmd: SimCommand) -> Result<()> {
    match cmd {
        SimCommand::Sensitivity(a) => sensitivity(g, a),
        SimCommand::Ic(a) => ic(g, a),
        SimCommand::Schedule(a) => schedule(g, a),
    }
}

fn sensitivity(g: &GlobalOpts, a: SensitivityArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let apps = input::apps(&a.apps)?;
    let cp = a.contention.params()?;
    let levels = input::levels(&a.levels)?;
    if let Some(bad) = levels.iter().find(|&&l| l > 100) {
        return Err(usage(format!("LoI level {bad} above 100")));
    }
    let fractions: Vec<f64> = levels.iter().map(|&l| l as f64 / 100.0).collect();

    let mut table = Table::new(&["app", "loi_percent", "relative_performance"]);
    let mut series = Vec::new();
    for app in &apps {
        let curve = sensitivity_curve(app, &s, &fractions, &cp)?;
        let mut pts = Vec::new();
        for (&level, point) in levels.iter().zip(&curve) {
            table.push(vec![
                app.name.as_str().into(),
                level.into(),
                point.relative_performance.into(),
            ]);
            pts.push((level as f64, point.relative_performance));
        }
        series.push(Series::new(app.name.clone(), pts, Style::Line));
    }
    let chart = Chart {
        title: "Sensitivity to memory-pool interference".into(),
        x_label: "LoI (%)".into(),
        y_label: "performance relative to LoI 0".into(),
        x_range: Some((0.0, 100.0)),
        y_range: Some((0.0, 1.0)),
        series,
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}

fn ic(g: &GlobalOpts, a: IcArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let apps = input::apps(&a.apps)?;
    let cp = a.contention.params()?;
    let probe = a.probe.model()?;

    let mut table = Table::new(&["app", "phase", "ic"]);
    let (mut phase_pts, mut app_pts, mut cats) = (Vec::new(), Vec::new(), Vec::new());
    for (i, app) in apps.iter().enumerate() {
        for p in &app.phases {
            let v = phase_ic(p, &s, &cp, &probe)?;
            table.push(vec![
                app.name.as_str().into(),
                p.tag.as_str().into(),
                v.into(),
            ]);
            phase_pts.push((i as f64, v));
        }
        let v = predict_ic(app, &s, &cp, &probe)?;
        table.push(vec![app.name.as_str().into(), "all".into(), v.into()]);
        app_pts.push((i as f64, v));
        cats.push((i as f64, app.name.clone()));
    }
    let chart = Chart {
        title: "Interference coefficient".into(),
        x_label: "application".into(),
        y_label: "probe runtime relative to idle".into(),
        x_range: Some((-0.5, apps.len() as f64 - 0.5)),
        x_categories: cats,
        series: vec![
            Series::new("phases", phase_pts, Style::Markers),
            Series::new("application", app_pts, Style::Markers),
        ],
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}

fn schedule(g: &GlobalOpts, a: ScheduleArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let apps = input::apps(&a.apps)?;
    let cp = a.contention.params()?;
    let cfg = ScheduleExperimentConfig {
        baseline_range: input::percent_range(&a.baseline)?,
        aware_range: input::percent_range(&a.aware)?,
        period_s: a.period,
        runs: a.runs,
        seed: a.seed,
    };
    let result = scheduler_experiment(&apps, &s, &cfg, &cp)?;

    if let Some(path) = &a.runs_out {
        let mut runs = Table::new(&["app", "policy", "run", "runtime_s"]);
        for r in &result.runs {
            runs.push(vec![
                r.app.as_str().into(),
                r.policy.as_str().into(),
                r.run.into(),
                r.runtime_s.0.into(),
            ]);
        }
        let mut buf = Vec::new();
        runs.write_csv(&mut buf)?;
        emit(Some(path), &buf)?;
    }

    let mut table = Table::new(&[
        "app", "policy", "min", "p25", "median", "p75", "max", "mean", "speedup",
    ]);
    let mut series = vec![
        Series::new("baseline median", Vec::new(), Style::Markers),
        Series::new("aware median", Vec::new(), Style::Markers),
        Series::new("baseline p75", Vec::new(), Style::Markers),
        Series::new("aware p75", Vec::new(), Style::Markers),
    ];
    let mut cats = Vec::new();
    for (i, (app, summary)) in apps.iter().zip(&result.apps).enumerate() {
        for (policy, st) in [("baseline", &summary.baseline), ("aware", &summary.aware)] {
            table.push(vec![
                summary.app.as_str().into(),
                policy.into(),
                st.min.0.into(),
                st.p25.0.into(),
                st.median.0.into(),
                st.p75.0.into(),
                st.max.0.into(),
                st.mean.0.into(),
                summary.speedup.0.into(),
            ]);
        }
        // normalize by the idle runtime so apps share one axis
        let idle = app_runtime(app, &s, 0.0, &cp)?;
        let x = i as f64;
        series[0].points.push((x, summary.baseline.median.0 / idle));
        series[1].points.push((x, summary.aware.median.0 / idle));
        series[2].points.push((x, summary.baseline.p75.0 / idle));
        series[3].points.push((x, summary.aware.p75.0 / idle));
        cats.push((x, summary.app.clone()));
    }
    let chart = Chart {
        title: format!("Scheduled runtime, {} runs, seed {}", cfg.runs, cfg.seed),
        x_label: "application".into(),
        y_label: "runtime relative to an idle pool".into(),
        x_range: Some((-0.5, apps.len() as f64 - 0.5)),
        x_categories: cats,
        series,
        ..Default::default()
    };
    finish(g, &table, Some(to_json(&result)?), Some(chart))
}
