//! CSV trace files: header `time,agent_id,x,y,theta,phi`, one agent sample per row.
//!
//! Floats are written in shortest round-trip form, so reading a written
//! trace returns the exact values.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use swarmalator_core::sim::SwarmSnapshot;
use swarmalator_core::trace::{TraceRecord, TraceSink};

pub const HEADER: [&str; 6] = ["time", "agent_id", "x", "y", "theta", "phi"];

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header lacks column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{value}` as {column}")]
    BadValue {
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: time goes backwards for agent {agent}")]
    TimeReversal { line: u64, agent: u32 },
}

/// Streams records to a CSV writer.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, TraceError> {
        let file = File::create(path).map_err(|source| TraceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        TraceWriter::new(BufWriter::new(file))
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> Result<Self, TraceError> {
        writeln!(out, "{}", HEADER.join(",")).map_err(io_err)?;
        Ok(TraceWriter { out })
    }

    pub fn write(&mut self, r: &TraceRecord) -> Result<(), TraceError> {
        writeln!(
            self.out,
            "{:?},{},{:?},{:?},{:?},{:?}",
            r.time, r.agent_id, r.x, r.y, r.theta, r.phi
        )
        .map_err(io_err)
    }

    pub fn finish(mut self) -> Result<W, TraceError> {
        self.out.flush().map_err(io_err)?;
        Ok(self.out)
    }
}

fn io_err(source: io::Error) -> TraceError {
    TraceError::Io {
        path: "<trace>".into(),
        source,
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    type Error = TraceError;

    fn record(&mut self, record: &TraceRecord) -> Result<(), TraceError> {
        self.write(record)
    }
}

pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> Result<W, TraceError> {
    let mut w = TraceWriter::new(out)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

pub fn write_trace_file(path: &Path, records: &[TraceRecord]) -> Result<(), TraceError> {
    let mut w = TraceWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish().map(|_| ())
}

/// Parses a trace. Columns are located by header name, in any order.
pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let mut cols = [0usize; 6];
    for (slot, name) in cols.iter_mut().zip(HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or(TraceError::MissingColumn(name))?;
    }
    let mut last_time = std::collections::HashMap::new();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != headers.len() {
            return Err(TraceError::FieldCount {
                line,
                expected: headers.len(),
                found: row.len(),
            });
        }
        let float = |k: usize| -> Result<f64, TraceError> {
            let v = &row[cols[k]];
            v.parse::<f64>().map_err(|_| TraceError::BadValue {
                line,
                column: HEADER[k],
                value: v.to_string(),
            })
        };
        let agent_id = row[cols[1]].parse::<u32>().map_err(|_| TraceError::BadValue {
            line,
            column: HEADER[1],
            value: row[cols[1]].to_string(),
        })?;
        let r = TraceRecord {
            time: float(0)?,
            agent_id,
            x: float(2)?,
            y: float(3)?,
            theta: float(4)?,
            phi: float(5)?,
        };
        if let Some(&t) = last_time.get(&agent_id) {
            if r.time < t {
                return Err(TraceError::TimeReversal { line, agent: agent_id });
            }
        }
        last_time.insert(agent_id, r.time);
        out.push(r);
    }
    Ok(out)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<TraceRecord>, TraceError> {
    let file = File::open(path).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_trace(io::BufReader::new(file))
}

/// Flattens snapshots into records, agents in stored order.
pub fn records_of(snapshots: &[SwarmSnapshot]) -> Vec<TraceRecord> {
    snapshots
        .iter()
        .flat_map(|s| s.agents.iter().map(move |a| TraceRecord::of(s.time, a)))
        .collect()
}
