use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use super::{finish, usage};
use crate::input;
use crate::report::Table;
use crate::svg::{Chart, Series, Style};
use crate::GlobalOpts;
use memtier_core::curves::build_scaling_curve;
use memtier_core::ingest::{
    aggregate_pages, open_input, parse_access_samples, parse_counter_records, segment_phases,
    EventRoles,
};
use memtier_core::metrics::{
    arithmetic_intensity, excess_traffic, prefetch_accuracy, prefetch_coverage, tiering_gap,
    PrefetchCounters,
};
use memtier_core::roofline::{
    attainable, classify_phase, log_grid, multi_tier_bandwidth, ridge_point, RooflinePoint,
};
use memtier_core::Tier;

/// Counter events holding total memory traffic with and without prefetching.
pub const TRAFFIC_PF_ON: &str = "TRAFFIC_PF_ON";
pub const TRAFFIC_PF_OFF: &str = "TRAFFIC_PF_OFF";

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Access samples (CSV, optionally .gz).
    pub samples: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub page_size: u64,
    /// Only count samples from this tier.
    #[arg(long)]
    pub tier: Option<Tier>,
}

pub fn curve(g: &GlobalOpts, a: CurveArgs) -> Result<()> {
    let input =
        open_input(&a.samples).with_context(|| format!("cannot open {}", a.samples.display()))?;
    let samples =
        parse_access_samples(input).with_context(|| format!("in {}", a.samples.display()))?;
    let hist = aggregate_pages(&samples, a.page_size, a.tier)?;
    if hist.is_empty() {
        return Err(usage(format!(
            "{} holds no access samples",
            a.samples.display()
        )));
    }
    let curve = build_scaling_curve(&hist)?;

    let mut table = Table::new(&["footprint_frac", "access_frac"]);
    for &(x, y) in curve.points() {
        table.push(vec![x.into(), y.into()]);
    }
    let chart = Chart {
        title: "Bandwidth-capacity scaling curve".into(),
        x_label: "fraction of footprint".into(),
        y_label: "fraction of accesses".into(),
        x_range: Some((0.0, 1.0)),
        y_range: Some((0.0, 1.0)),
        series: vec![
            Series::new(
                "accesses",
                std::iter::once((0.0, 0.0))
                    .chain(curve.points().iter().copied())
                    .collect(),
                Style::Line,
            ),
            Series::new("uniform", vec![(0.0, 0.0), (1.0, 1.0)], Style::Dashed),
        ],
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}

#[derive(Args, Debug)]
pub struct PrefetchArgs {
    /// Counter records (CSV, optionally .gz).
    pub counters: PathBuf,
}

pub fn prefetch(g: &GlobalOpts, a: PrefetchArgs) -> Result<()> {
    let input =
        open_input(&a.counters).with_context(|| format!("cannot open {}", a.counters.display()))?;
    let records =
        parse_counter_records(input).with_context(|| format!("in {}", a.counters.display()))?;
    let none: [&str; 0] = [];
    let phases = segment_phases(&records, &EventRoles::new(none, none, none))?;
    if phases.is_empty() {
        return Err(usage(format!(
            "{} holds no tagged counter records",
            a.counters.display()
        )));
    }

    let mut table = Table::new(&[
        "phase",
        "pf_l2_data_rd",
        "pf_l2_rfo",
        "l2_lines_in",
        "useless_hwpf",
        "accuracy",
        "coverage",
        "excess_traffic",
    ]);
    let (mut acc_pts, mut cov_pts, mut cats) = (Vec::new(), Vec::new(), Vec::new());
    for (i, p) in phases.iter().enumerate() {
        let get = |ev: &str| {
            p.counters
                .get(ev)
                .copied()
                .ok_or_else(|| usage(format!("phase {:?} is missing counter event {ev}", p.tag)))
        };
        let [rd, rfo, lines, useless] = PrefetchCounters::EVENTS;
        let c = PrefetchCounters::new(get(rd)?, get(rfo)?, get(lines)?, get(useless)?);
        let ctx = || format!("phase {:?}", p.tag);
        let accuracy = prefetch_accuracy(&c).with_context(ctx)?;
        let coverage = prefetch_coverage(&c).with_context(ctx)?;
        let excess = match (
            p.counters.get(TRAFFIC_PF_ON),
            p.counters.get(TRAFFIC_PF_OFF),
        ) {
            (Some(&on), Some(&off)) => {
                Some(excess_traffic(on as f64, off as f64).with_context(ctx)?)
            }
            _ => None,
        };
        table.push(vec![
            p.tag.as_str().into(),
            c.pf_l2_data_rd.into(),
            c.pf_l2_rfo.into(),
            c.l2_lines_in.into(),
            c.useless_hwpf.into(),
            accuracy.into(),
            coverage.into(),
            excess.into(),
        ]);
        acc_pts.push((i as f64, accuracy));
        cov_pts.push((i as f64, coverage));
        cats.push((i as f64, p.tag.clone()));
    }
    let chart = Chart {
        title: "L2 prefetching".into(),
        x_label: "phase".into(),
        y_label: "fraction".into(),
        x_range: Some((-0.5, phases.len() as f64 - 0.5)),
        y_range: Some((0.0, 1.0)),
        x_categories: cats,
        series: vec![
            Series::new("accuracy", acc_pts, Style::Markers),
            Series::new("coverage", cov_pts, Style::Markers),
        ],
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}

#[derive(Args, Debug)]
pub struct TieringArgs {
    /// Phase profiles: a JSON array or an application model.
    pub phases: PathBuf,
}

pub fn tiering(g: &GlobalOpts, a: TieringArgs) -> Result<()> {
    let system = input::system(g.system.as_ref())?;
    let phases = input::phases(&a.phases)?;
    let mut table = Table::new(&["phase", "r_access", "r_cap", "r_bw", "classification"]);
    let (mut pts, mut cats) = (Vec::new(), Vec::new());
    let (mut r_cap, mut r_bw) = (0.0, 0.0);
    for (i, p) in phases.iter().enumerate() {
        let r = tiering_gap(p, &system).with_context(|| format!("phase {:?}", p.tag))?;
        table.push(vec![
            r.phase.as_str().into(),
            r.r_access.into(),
            r.r_cap.into(),
            r.r_bw.into(),
            r.classification.as_str().into(),
        ]);
        pts.push((i as f64, r.r_access));
        cats.push((i as f64, r.phase.clone()));
        (r_cap, r_bw) = (r.r_cap, r.r_bw);
    }
    let span = (-0.5, phases.len() as f64 - 0.5);
    let chart = Chart {
        title: "Remote access ratio".into(),
        x_label: "phase".into(),
        y_label: "ratio of accesses to the remote tier".into(),
        x_range: Some(span),
        y_range: Some((0.0, 1.0)),
        x_categories: cats,
        series: vec![
            Series::new("R_access", pts, Style::Markers),
            Series::new(
                "R_cap",
                vec![(span.0, r_cap), (span.1, r_cap)],
                Style::Dashed,
            ),
            Series::new("R_BW", vec![(span.0, r_bw), (span.1, r_bw)], Style::Dashed),
        ],
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}

#[derive(Args, Debug)]
pub struct RooflineArgs {
    /// Phase profiles: a JSON array or an application model.
    pub phases: PathBuf,
}

pub fn roofline(g: &GlobalOpts, a: RooflineArgs) -> Result<()> {
    let s = input::system(g.system.as_ref())?;
    let phases = input::phases(&a.phases)?;
    let f = s.peak_flops_per_s;
    let local_bw = s.local.bandwidth_bytes_per_s;
    let multi_bw = multi_tier_bandwidth(&s);

    let mut table = Table::new(&[
        "phase",
        "intensity",
        "throughput_flops_per_s",
        "attainable_local",
        "attainable_multi_tier",
        "ridge_multi_tier",
        "bound",
    ]);
    let mut series = Vec::new();
    let mut intensities = Vec::new();
    for p in &phases {
        let ctx = || format!("phase {:?}", p.tag);
        let ai = arithmetic_intensity(p).with_context(ctx)?;
        let point =
            RooflinePoint::new(p.tag.clone(), ai, p.flops / p.duration_s).with_context(ctx)?;
        table.push(vec![
            p.tag.as_str().into(),
            ai.into(),
            point.throughput_flops_per_s.into(),
            attainable(f, local_bw, ai)?.into(),
            attainable(f, multi_bw, ai)?.into(),
            ridge_point(f, multi_bw).into(),
            classify_phase(&point, f, multi_bw).as_str().into(),
        ]);
        series.push(Series::new(
            point.label.clone(),
            vec![(ai, point.throughput_flops_per_s)],
            Style::Markers,
        ));
        intensities.push(ai);
    }
    let lo = intensities.iter().copied().fold(1e-2, f64::min) / 10.0;
    let hi = intensities
        .iter()
        .copied()
        .fold(ridge_point(f, local_bw), f64::max)
        * 10.0;
    let grid = log_grid(lo, hi, 64)?;
    let roof = |bw: f64| grid.iter().map(|&i| (i, f.min(bw * i))).collect::<Vec<_>>();
    series.insert(0, Series::new("multi-tier", roof(multi_bw), Style::Dashed));
    series.insert(0, Series::new("local DRAM", roof(local_bw), Style::Line));
    let chart = Chart {
        title: "Roofline".into(),
        x_label: "arithmetic intensity (flop/byte)".into(),
        y_label: "flop/s".into(),
        log_x: true,
        log_y: true,
        series,
        ..Default::default()
    };
    finish(g, &table, None, Some(chart))
}
