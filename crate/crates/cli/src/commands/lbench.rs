use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};

use super::finish;
use crate::input;
use crate::report::{to_json, Table};
use crate::svg::{Chart, Series, Style};
use crate::GlobalOpts;
use memtier_core::lbench::{
    bytes_per_element, calibrate_loi, flops_per_element, predict_traffic, run_kernel, KernelConfig,
    PlacedBuffer, Placement, TrafficModel,
};

#[derive(Subcommand, Debug)]
pub enum LbenchCommand {
    /// Run the kernel on this machine and report its traffic.
    Run(RunArgs),
    /// Flops per element needed for each LoI level.
    Calibrate(CalibrateArgs),
    /// Link traffic predicted for one configuration.
    Predict(PredictArgs),
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Traffic model parameters (JSON); overrides the flags below.
    #[arg(long, value_name = "PATH")]
    pub traffic_model: Option<PathBuf>,
    #[arg(long, default_value_t = TrafficModel::TESTBED.per_core_flops)]
    pub per_core_flops: f64,
    #[arg(long, default_value_t = TrafficModel::TESTBED.per_thread_bandwidth)]
    pub per_thread_bandwidth: f64,
    /// Count the store's read-for-ownership fill as traffic.
    #[arg(long)]
    pub rfo: bool,
}

impl ModelArgs {
    pub fn model(&self) -> Result<TrafficModel> {
        let m = match &self.traffic_model {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("invalid traffic model {}", path.display()))?
            }
            None => TrafficModel {
                per_core_flops: self.per_core_flops,
                per_thread_bandwidth: self.per_thread_bandwidth,
                count_rfo: self.rfo,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub nflop: u32,
    #[arg(long, default_value_t = 1)]
    pub threads: u32,
    /// Array length in doubles (default: four times the last-level cache).
    #[arg(long)]
    pub elems: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: u32,
    #[arg(long, default_value = "remote")]
    pub placement: Placement,
    #[arg(long)]
    pub rfo: bool,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub threads: u32,
    /// LoI levels in percent: `a..b` (step 10), `a..b:step` or `a,b,c`.
    #[arg(long, default_value = "10..100")]
    pub levels: String,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub nflop: u32,
    #[arg(long)]
    pub threads: u32,
    #[command(flatten)]
    pub model: ModelArgs,
}

pub fn run(g: &GlobalOpts, cmd: LbenchCommand) -> Result<()> {
    match cmd {
        LbenchCommand::Run(a) => run_benchmark(g, a),
        LbenchCommand::Calibrate(a) => calibrate(g, a),
        LbenchCommand::Predict(a) => predict(g, a),
    }
}

fn run_benchmark(g: &GlobalOpts, a: RunArgs) -> Result<()> {
    let elems = a.elems.unwrap_or_else(KernelConfig::default_elems);
    let cfg = KernelConfig::new(a.nflop, a.threads, elems, a.trials)?;
    let mut buf = PlacedBuffer::new(elems, a.placement)?;
    if !buf.is_bound() {
        log::info!("running without NUMA binding");
    }
    let run = run_kernel(&cfg, &mut buf)?;
    let secs = run.elapsed.as_secs_f64();
    let touched = elems as f64 * a.trials as f64;
    let bytes = touched * bytes_per_element(a.rfo) as f64;
    let flops = touched * flops_per_element(a.nflop)? as f64;

    let mut table = Table::new(&[
        "nflop",
        "threads",
        "elems",
        "trials",
        "placement",
        "elapsed_s",
        "traffic_bytes_per_s",
        "flops_per_s",
        "loi_percent",
    ]);
    // LoI is only meaningful against a known system
    let loi = match &g.system {
        Some(_) => Some(
            100.0 * bytes / secs / input::system(g.system.as_ref())?.peak_loi_traffic_bytes_per_s,
        ),
        None => None,
    };
    table.push(vec![
        a.nflop.into(),
        a.threads.into(),
        (elems as u64).into(),
        a.trials.into(),
        a.placement.as_str().into(),
        secs.into(),
        (bytes / secs).into(),
        (flops / secs).into(),
        loi.into(),
    ]);
    finish(g, &table, None, None)
}

fn calibrate(g: &GlobalOpts, a: CalibrateArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let model = a.model.model()?;
    let levels = input::levels(&a.levels)?;
    let mut failure = None;
    let cal = calibrate_loi(
        &s,
        &levels,
        a.threads,
        |nflop, threads| match KernelConfig::new(nflop, threads, 1, 1)
            .and_then(|cfg| predict_traffic(&cfg, &s, &model))
        {
            Ok(t) => t,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let cal = cal?;

    let peak = s.peak_loi_traffic_bytes_per_s;
    let mut table = Table::new(&["level", "nflop", "traffic_bytes_per_s", "loi_percent"]);
    let mut pts = Vec::new();
    for (&level, &nflop) in &cal.entries {
        let t = predict_traffic(&KernelConfig::new(nflop, a.threads, 1, 1)?, &s, &model)?;
        table.push(vec![
            level.into(),
            nflop.into(),
            t.into(),
            (100.0 * t / peak).into(),
        ]);
        pts.push((level as f64, nflop as f64));
    }
    let chart = Chart {
        title: format!("LoI calibration, {} thread(s)", a.threads),
        x_label: "LoI (%)".into(),
        y_label: "flops per element".into(),
        log_y: true,
        x_range: Some((0.0, 100.0)),
        series: vec![Series::new("nflop", pts, Style::Line)],
        ..Default::default()
    };
    finish(g, &table, Some(to_json(&cal)?), Some(chart))
}

fn predict(g: &GlobalOpts, a: PredictArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let model = a.model.model()?;
    let cfg = KernelConfig::new(a.nflop, a.threads, 1, 1)?;
    let t = predict_traffic(&cfg, &s, &model)?;
    let mut table = Table::new(&["nflop", "threads", "traffic_bytes_per_s", "loi_percent"]);
    table.push(vec![
        a.nflop.into(),
        a.threads.into(),
        t.into(),
        (100.0 * t / s.peak_loi_traffic_bytes_per_s).into(),
    ]);
    finish(g, &table, None, None)
}
