//! CSV file formats.
//!
//! * signals: `n,value`, an empty value marks a missing sample
//! * nonuniform samples: `t,value`
//! * traces: `m,delta,beta_deg,measure,tr_db`
//! * grid records and cell summaries, see [`crate::harness`]

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use gradrec_core::nonuniform::NonuniformSample;
use gradrec_core::recon::{PartialSignal, TraceEntry};
use gradrec_core::spectral::Signal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::AppError;
use crate::harness::{CellSummary, TrialRecord};

pub const SIGNAL_HEADER: [&str; 2] = ["n", "value"];
pub const NONUNIFORM_HEADER: [&str; 2] = ["t", "value"];
pub const TRACE_HEADER: [&str; 5] = ["m", "delta", "beta_deg", "measure", "tr_db"];
pub const RECORD_HEADER: [&str; 8] = [
    "s",
    "M",
    "trial",
    "srr_db",
    "full_recovery",
    "iterations",
    "elapsed_s",
    "detected_sparse",
];
pub const SUMMARY_HEADER: [&str; 6] = [
    "s",
    "M",
    "mean_srr_db",
    "recovery_pct",
    "mean_iter",
    "mean_elapsed_s",
];

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    n: usize,
    value: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PointRow {
    t: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct TraceRow {
    m: usize,
    delta: f64,
    beta_deg: Option<f64>,
    measure: f64,
    tr_db: Option<f64>,
}

pub fn open(path: &Path) -> Result<BufReader<File>, AppError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| AppError::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path, e))
}

fn read_rows<T: DeserializeOwned, R: Read>(
    reader: R,
    source: &Path,
    header: &[&str],
) -> Result<Vec<T>, AppError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| AppError::format(source, e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(AppError::format(
            source,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    rdr.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| AppError::format(source, e.to_string()))
}

fn write_rows<T: Serialize, W: Write>(
    writer: W,
    target: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<(), AppError> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    let fail = |e: csv::Error| AppError::format(target, e.to_string());
    wtr.write_record(header).map_err(fail)?;
    for row in rows {
        wtr.serialize(row).map_err(fail)?;
    }
    wtr.flush().map_err(|e| AppError::io(target, e))
}

/// Signal rows keyed by `n`; every index `0..N` must appear exactly once.
pub fn read_signal_rows<R: Read>(reader: R, source: &Path) -> Result<Vec<Option<f64>>, AppError> {
    let rows: Vec<SignalRow> = read_rows(reader, source, &SIGNAL_HEADER)?;
    let len = rows.len();
    let mut values = vec![None; len];
    let mut seen = vec![false; len];
    for row in rows {
        if row.n >= len {
            return Err(AppError::format(
                source,
                format!("sample index {} outside 0..{len}", row.n),
            ));
        }
        if std::mem::replace(&mut seen[row.n], true) {
            return Err(AppError::format(
                source,
                format!("sample index {} repeated", row.n),
            ));
        }
        values[row.n] = row.value;
    }
    Ok(values)
}

pub fn read_partial_signal(path: &Path) -> Result<PartialSignal, AppError> {
    let values = read_signal_rows(open(path)?, path)?;
    let len = values.len();
    PartialSignal::from_pairs(
        len,
        values
            .iter()
            .enumerate()
            .filter_map(|(n, v)| v.map(|v| (n, v))),
    )
    .map_err(|e| AppError::format(path, e.to_string()))
}

/// A signal file without missing rows.
pub fn read_signal(path: &Path) -> Result<Signal, AppError> {
    let values = read_signal_rows(open(path)?, path)?;
    let values = values
        .iter()
        .enumerate()
        .map(|(n, v)| v.ok_or_else(|| AppError::format(path, format!("sample {n} is missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    Signal::new(values).map_err(|e| AppError::format(path, e.to_string()))
}

pub fn write_signal<W: Write>(writer: W, target: &Path, values: &[f64]) -> Result<(), AppError> {
    write_rows(
        writer,
        target,
        &SIGNAL_HEADER,
        values
            .iter()
            .enumerate()
            .map(|(n, &v)| SignalRow { n, value: Some(v) }),
    )
}

pub fn write_partial_signal<W: Write>(
    writer: W,
    target: &Path,
    partial: &PartialSignal,
) -> Result<(), AppError> {
    let mut values = vec![None; partial.len()];
    for (&n, &v) in partial
        .sample_set()
        .available()
        .iter()
        .zip(partial.values())
    {
        values[n] = Some(v);
    }
    write_rows(
        writer,
        target,
        &SIGNAL_HEADER,
        values
            .into_iter()
            .enumerate()
            .map(|(n, value)| SignalRow { n, value }),
    )
}

pub fn read_points<R: Read>(reader: R, source: &Path) -> Result<Vec<(f64, f64)>, AppError> {
    let rows: Vec<PointRow> = read_rows(reader, source, &NONUNIFORM_HEADER)?;
    Ok(rows.into_iter().map(|r| (r.t, r.value)).collect())
}

pub fn write_points<W: Write>(
    writer: W,
    target: &Path,
    samples: &[NonuniformSample],
) -> Result<(), AppError> {
    write_rows(
        writer,
        target,
        &NONUNIFORM_HEADER,
        samples.iter().map(|s| PointRow {
            t: s.t,
            value: s.value,
        }),
    )
}

pub fn write_trace<W: Write>(
    writer: W,
    target: &Path,
    trace: &[TraceEntry],
) -> Result<(), AppError> {
    write_rows(
        writer,
        target,
        &TRACE_HEADER,
        trace.iter().map(|e| TraceRow {
            m: e.iteration,
            delta: e.delta,
            beta_deg: e.beta_deg,
            measure: e.measure,
            tr_db: e.tr_db,
        }),
    )
}

pub fn write_records<W: Write>(
    writer: W,
    target: &Path,
    records: &[TrialRecord],
) -> Result<(), AppError> {
    write_rows(writer, target, &RECORD_HEADER, records)
}

pub fn read_records<R: Read>(reader: R, source: &Path) -> Result<Vec<TrialRecord>, AppError> {
    read_rows(reader, source, &RECORD_HEADER)
}

pub fn write_summaries<W: Write>(
    writer: W,
    target: &Path,
    cells: &[CellSummary],
) -> Result<(), AppError> {
    write_rows(writer, target, &SUMMARY_HEADER, cells)
}
