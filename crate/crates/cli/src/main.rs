//! `memtier`: profile analysis, interference benchmarking and pool
//! contention simulation from the command line.

mod commands;
mod input;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "memtier",
    version,
    about = "Analyze application behavior on tiered and pooled memory"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Write results here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,

    /// Also render an SVG chart to this path.
    #[arg(long, global = true, value_name = "PATH.svg")]
    pub plot: Option<PathBuf>,

    /// System description (JSON).
    #[arg(long, global = true, env = "MEMTIER_SYSTEM", value_name = "PATH")]
    pub system: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bandwidth-capacity scaling curve from access samples.
    Curve(commands::analysis::CurveArgs),
    /// Prefetch accuracy, coverage and excess traffic per phase.
    Prefetch(commands::analysis::PrefetchArgs),
    /// Remote access ratio of each phase against the capacity and bandwidth references.
    Tiering(commands::analysis::TieringArgs),
    /// Place phases on the single- and multi-tier roofline.
    Roofline(commands::analysis::RooflineArgs),
    /// Interference benchmark.
    #[command(subcommand)]
    Lbench(commands::lbench::LbenchCommand),
    /// Memory-pool contention simulator.
    #[command(subcommand)]
    Sim(commands::sim::SimCommand),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Curve(a) => commands::analysis::curve(&cli.global, a),
        Command::Prefetch(a) => commands::analysis::prefetch(&cli.global, a),
        Command::Tiering(a) => commands::analysis::tiering(&cli.global, a),
        Command::Roofline(a) => commands::analysis::roofline(&cli.global, a),
        Command::Lbench(c) => commands::lbench::run(&cli.global, c),
        Command::Sim(c) => commands::sim::run(&cli.global, c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("memtier: {}", describe(&err));
            ExitCode::from(commands::exit_code(&err))
        }
    }
}

/// The error chain joined with `: `, skipping causes whose text the
/// previous message already includes.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut prev = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if !prev.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
        prev = msg;
    }
    out
}
