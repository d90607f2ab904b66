pub mod analysis;
pub mod lbench;
pub mod sim;

use memtier_core::Error;

/// Usage problems detected by the CLI itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 0 ok, 1 I/O or unreadable input, 2 invalid input, 3 domain error.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Io(_) | Error::Parse { .. } => 1,
                Error::Validation(_) | Error::InvalidArgument(_) | Error::Json(_) => 2,
                Error::Undefined(..) | Error::UnreachableLevel { .. } => 3,
            };
        }
        if cause.is::<UsageError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return 1;
        }
    }
    1
}

use anyhow::Result;

use crate::report::{emit, render, Table};
use crate::svg::{self, Chart};
use crate::GlobalOpts;

/// Writes the table (or the JSON override) and, when requested, the chart.
pub fn finish(
    g: &GlobalOpts,
    table: &Table,
    json: Option<String>,
    chart: Option<Chart>,
) -> Result<()> {
    if let Some(path) = &g.plot {
        svg::check_path(path)?;
    }
    let bytes = render(table, g.format.into(), json)?;
    emit(g.out.as_deref(), &bytes)?;
    if let Some(path) = &g.plot {
        match chart {
            Some(c) => emit(Some(path), c.render().as_bytes())?,
            None => log::warn!("this command has no chart; --plot ignored"),
        }
    }
    Ok(())
}
