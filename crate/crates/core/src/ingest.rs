//! Recorded profiling data: access samples, counter streams and phases.
//!
//! Two CSV formats are understood, UTF-8 with LF or CRLF line endings:
//!
//! ```text
//! timestamp_ns,vaddr,tier,weight        # access samples
//! timestamp_ns,event,value,phase        # counter records
//! ```
//!
//! Addresses may be decimal or `0x`-prefixed hex. Files ending in `.gz` are
//! decompressed transparently by [`open_input`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};
use crate::model::{PhaseProfile, Tier};

pub const SAMPLE_HEADER: [&str; 4] = ["timestamp_ns", "vaddr", "tier", "weight"];
pub const COUNTER_HEADER: [&str; 4] = ["timestamp_ns", "event", "value", "phase"];

/// Collector sampling interval; also the shortest phase duration reported.
pub const DEFAULT_INTERVAL_S: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AccessSample {
    pub timestamp_ns: u64,
    pub virtual_address: u64,
    pub tier: Tier,
    /// Number of accesses the sample stands for.
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRecord {
    pub timestamp_ns: u64,
    pub event: String,
    pub value: u64,
    pub phase_tag: String,
}

/// Access weight per page number.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PageHistogram {
    pub page_size_bytes: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl PageHistogram {
    pub fn total_weight(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }
}

/// Opens `path` for reading, decompressing when the name ends in `.gz`.
pub fn open_input(path: &Path) -> io::Result<Box<dyn Read>> {
    let file = File::open(path)?;
    let gz = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(MultiGzDecoder::new(BufReader::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str; 4]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_error(e, 0))?;
    if header.is_empty() {
        return Ok(());
    }
    for (i, want) in expected.iter().enumerate() {
        match header.get(i) {
            Some(got) if got == *want => {}
            got => {
                return Err(Error::Parse {
                    row: 0,
                    column: (*want).to_string(),
                    message: format!(
                        "expected header column {want:?}, found {:?}",
                        got.unwrap_or("")
                    ),
                })
            }
        }
    }
    if header.len() != expected.len() {
        return Err(Error::Parse {
            row: 0,
            column: "header".into(),
            message: format!(
                "expected {} columns, found {}",
                expected.len(),
                header.len()
            ),
        });
    }
    Ok(())
}

fn csv_error(e: csv::Error, row: usize) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::Parse {
            row,
            column: "*".into(),
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse {
            row,
            column: "*".into(),
            message: format!("{other:?}"),
        },
    }
}

fn parse_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

fn parse_u64(raw: &str, row: usize, column: &str) -> Result<u64> {
    raw.parse::<u64>().map_err(|_| {
        parse_err(
            row,
            column,
            format!("expected a non-negative integer, found {raw:?}"),
        )
    })
}

fn parse_address(raw: &str, row: usize) -> Result<u64> {
    let parsed = match raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => raw.parse::<u64>(),
    };
    parsed.map_err(|_| parse_err(row, "vaddr", format!("invalid address {raw:?}")))
}

/// Parses access samples; a header-only or empty input yields an empty list.
///
/// Rows are numbered from 1 (the first data row) in error messages.
pub fn parse_access_samples<R: Read>(input: R) -> Result<Vec<AccessSample>> {
    let mut rdr = csv_reader(input);
    check_header(&mut rdr, &SAMPLE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(e, row))?;
        let timestamp_ns = parse_u64(&rec[0], row, "timestamp_ns")?;
        let virtual_address = parse_address(&rec[1], row)?;
        let tier: Tier = rec[2]
            .parse()
            .map_err(|m: String| parse_err(row, "tier", m))?;
        let weight = parse_u64(&rec[3], row, "weight")?;
        if weight == 0 {
            return Err(parse_err(row, "weight", "weight must be at least 1"));
        }
        out.push(AccessSample {
            timestamp_ns,
            virtual_address,
            tier,
            weight,
        });
    }
    Ok(out)
}

/// Writes samples in the format [`parse_access_samples`] reads.
pub fn write_access_samples<W: Write>(samples: &[AccessSample], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", SAMPLE_HEADER.join(","))?;
    for s in samples {
        writeln!(
            out,
            "{},{:#x},{},{}",
            s.timestamp_ns, s.virtual_address, s.tier, s.weight
        )?;
    }
    Ok(())
}

/// Parses counter records. Event names are passed through unchanged.
pub fn parse_counter_records<R: Read>(input: R) -> Result<Vec<CounterRecord>> {
    let mut rdr = csv_reader(input);
    check_header(&mut rdr, &COUNTER_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(e, row))?;
        let timestamp_ns = parse_u64(&rec[0], row, "timestamp_ns")?;
        let event = rec[1].to_string();
        if event.is_empty() {
            return Err(parse_err(row, "event", "event name is empty"));
        }
        let raw = &rec[2];
        if raw.starts_with('-') {
            return Err(parse_err(
                row,
                "value",
                format!("negative counter value {raw}"),
            ));
        }
        let value = parse_u64(raw, row, "value")?;
        out.push(CounterRecord {
            timestamp_ns,
            event,
            value,
            phase_tag: rec[3].to_string(),
        });
    }
    Ok(out)
}

/// Sums sample weights per page, optionally keeping only one tier.
pub fn aggregate_pages(
    samples: &[AccessSample],
    page_size: u64,
    tier_filter: Option<Tier>,
) -> Result<PageHistogram> {
    if !page_size.is_power_of_two() {
        return Err(Error::invalid(format!(
            "page size {page_size} is not a power of two"
        )));
    }
    let shift = page_size.trailing_zeros();
    let mut counts = BTreeMap::new();
    for s in samples
        .iter()
        .filter(|s| tier_filter.is_none_or(|t| s.tier == t))
    {
        *counts.entry(s.virtual_address >> shift).or_insert(0) += s.weight;
    }
    Ok(PageHistogram {
        page_size_bytes: page_size,
        counts,
    })
}

/// Which counter events contribute to the flop and byte totals of a phase.
#[derive(Clone, Debug)]
pub struct EventRoles {
    pub flop_events: BTreeSet<String>,
    pub local_byte_events: BTreeSet<String>,
    pub remote_byte_events: BTreeSet<String>,
    pub interval_s: f64,
}

impl EventRoles {
    pub fn new<I, S>(flops: I, local: I, remote: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            flop_events: flops.into_iter().map(Into::into).collect(),
            local_byte_events: local.into_iter().map(Into::into).collect(),
            remote_byte_events: remote.into_iter().map(Into::into).collect(),
            interval_s: DEFAULT_INTERVAL_S,
        }
    }

    fn check_disjoint(&self) -> Result<()> {
        let sets = [
            ("flop", &self.flop_events),
            ("local-byte", &self.local_byte_events),
            ("remote-byte", &self.remote_byte_events),
        ];
        for (i, (na, a)) in sets.iter().enumerate() {
            for (nb, b) in &sets[i + 1..] {
                if let Some(ev) = a.intersection(b).next() {
                    return Err(Error::invalid(format!(
                        "event {ev:?} is mapped to both the {na} and {nb} roles"
                    )));
                }
            }
        }
        if !(self.interval_s.is_finite() && self.interval_s > 0.0) {
            return Err(Error::invalid("collector interval must be positive"));
        }
        Ok(())
    }
}

#[derive(Default)]
struct PhaseAcc {
    first_ts: u64,
    last_ts: u64,
    flops: u64,
    local: u64,
    remote: u64,
    counters: BTreeMap<String, u64>,
}

/// Groups records by phase tag into profiles, in first-appearance order.
///
/// Records with an empty tag are ignored. Every event is also summed into the
/// profile's `counters` map.
pub fn segment_phases(records: &[CounterRecord], roles: &EventRoles) -> Result<Vec<PhaseProfile>> {
    roles.check_disjoint()?;
    let mut order: Vec<&str> = Vec::new();
    let mut acc: HashMap<&str, PhaseAcc> = HashMap::new();
    for r in records.iter().filter(|r| !r.phase_tag.is_empty()) {
        let a = acc.entry(&r.phase_tag).or_insert_with(|| {
            order.push(&r.phase_tag);
            PhaseAcc {
                first_ts: r.timestamp_ns,
                last_ts: r.timestamp_ns,
                ..Default::default()
            }
        });
        a.first_ts = a.first_ts.min(r.timestamp_ns);
        a.last_ts = a.last_ts.max(r.timestamp_ns);
        if roles.flop_events.contains(&r.event) {
            a.flops += r.value;
        } else if roles.local_byte_events.contains(&r.event) {
            a.local += r.value;
        } else if roles.remote_byte_events.contains(&r.event) {
            a.remote += r.value;
        }
        *a.counters.entry(r.event.clone()).or_insert(0) += r.value;
    }
    Ok(order
        .into_iter()
        .map(|tag| {
            let a = acc.remove(tag).expect("tag recorded");
            let span = (a.last_ts - a.first_ts) as f64 / 1e9;
            PhaseProfile {
                tag: tag.to_string(),
                duration_s: span.max(roles.interval_s),
                flops: a.flops as f64,
                bytes_local: a.local as f64,
                bytes_remote: a.remote as f64,
                counters: a.counters,
            }
        })
        .collect())
}
