//! On-disk formats: trajectory, boundary and PSD CSVs plus summary JSON.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back yields bit-identical values and repeated runs produce
//! byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ancsat_core::controllers::Branch;
use ancsat_core::harness::{RunSummary, ScenarioConfig, TrajectoryRecord};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectrum::Psd;

/// Per-run JSON document: the full configuration next to its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ScenarioConfig,
    pub synthetic_paths: bool,
    pub summary: RunSummary,
    /// SHA-256 of the trajectory CSV bytes.
    pub trajectory_sha256: String,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io("creating directory", parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io("creating", path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(bytes).and_then(|_| f.flush()).map_err(|e| Error::io("writing", path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("accessing", path, io),
        other => Error::Format { kind: "CSV", path: path.into(), message: format!("{other:?}") },
    }
}

fn format_err(kind: &'static str, path: &Path, message: impl Into<String>) -> Error {
    Error::Format { kind, path: path.into(), message: message.into() }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(|e| csv_err(path, e))
}

fn parse_f64(kind: &'static str, path: &Path, field: &str) -> Result<f64> {
    field.parse().map_err(|_| format_err(kind, path, format!("not a number: `{field}`")))
}

/// Render a trajectory as CSV bytes with columns
/// `sample_index, w_0..w_{k-1}, e, y, power_estimate, mu1, branch`.
pub fn trajectory_csv(records: &[TrajectoryRecord]) -> Result<Vec<u8>> {
    let width = records.first().map_or(0, |r| r.weights.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sample_index".to_string()];
    header.extend((0..width).map(|k| format!("w_{k}")));
    header.extend(["e", "y", "power_estimate", "mu1", "branch"].map(String::from));
    let io = |e: csv::Error| Error::Analysis(format!("CSV encoding failed: {e}"));
    w.write_record(&header).map_err(io)?;
    let mut row = Vec::with_capacity(header.len());
    for r in records {
        if r.weights.len() != width {
            return Err(Error::Analysis("trajectory records differ in weight count".into()));
        }
        row.clear();
        row.push(r.sample_index.to_string());
        row.extend(r.weights.iter().map(f64::to_string));
        row.extend([r.error, r.output, r.output_power_estimate, r.step_size].map(|v| v.to_string()));
        row.push(r.branch.as_str().to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Analysis(format!("CSV encoding failed: {e}")))
}

pub fn write_trajectory(path: &Path, records: &[TrajectoryRecord]) -> Result<String> {
    let bytes = trajectory_csv(records)?;
    write_bytes(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    const KIND: &str = "trajectory CSV";
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let width = header.iter().filter(|h| h.starts_with("w_")).count();
    if header.len() != width + 6 || header.get(0) != Some("sample_index") {
        return Err(format_err(KIND, path, "unexpected header"));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let f = |i: usize| parse_f64(KIND, path, &row[i]);
        let sample_index = row[0]
            .parse()
            .map_err(|_| format_err(KIND, path, format!("bad sample index `{}`", &row[0])))?;
        let weights = (1..=width).map(f).collect::<Result<Vec<_>>>()?;
        let branch = match &row[width + 5] {
            "within" => Branch::Within,
            "exceeded" => Branch::Exceeded,
            other => return Err(format_err(KIND, path, format!("unknown branch `{other}`"))),
        };
        out.push(TrajectoryRecord {
            sample_index,
            weights,
            error: f(width + 1)?,
            output: f(width + 2)?,
            output_power_estimate: f(width + 3)?,
            step_size: f(width + 4)?,
            branch,
        });
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Analysis(format!("JSON encoding failed: {e}")))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io("reading", path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| format_err("JSON", path, e.to_string()))
}

/// Two-column `w_0, w_1` CSV of a constraint ellipse.
pub fn write_boundary(path: &Path, points: &[[f64; 2]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["w_0", "w_1"]).map_err(|e| csv_err(path, e))?;
    for p in points {
        w.write_record([p[0].to_string(), p[1].to_string()]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io("writing", path, e))
}

pub fn read_boundary(path: &Path) -> Result<Vec<[f64; 2]>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        if row.len() != 2 {
            return Err(format_err("boundary CSV", path, "expected two columns"));
        }
        out.push([parse_f64("boundary CSV", path, &row[0])?, parse_f64("boundary CSV", path, &row[1])?]);
    }
    Ok(out)
}

/// Spectra sharing one frequency grid, in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdTable {
    pub frequencies: Vec<f64>,
    /// `(label, dB values)`, written as `<label>_db` columns.
    pub columns: Vec<(String, Vec<f64>)>,
}

impl PsdTable {
    pub fn new(frequencies: Vec<f64>) -> Self {
        Self { frequencies, columns: Vec::new() }
    }

    pub fn push(&mut self, label: &str, psd: &Psd) -> Result<()> {
        if psd.frequencies != self.frequencies {
            return Err(Error::Analysis(format!("spectrum `{label}` uses a different frequency grid")));
        }
        self.columns.push((label.to_string(), psd.to_db()));
        Ok(())
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }
}

pub fn write_psd(path: &Path, table: &PsdTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["frequency_hz".to_string()];
    header.extend(table.columns.iter().map(|(l, _)| format!("{l}_db")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (i, f) in table.frequencies.iter().enumerate() {
        let mut row = vec![f.to_string()];
        row.extend(table.columns.iter().map(|(_, v)| v[i].to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io("writing", path, e))
}

pub fn read_psd(path: &Path) -> Result<PsdTable> {
    const KIND: &str = "PSD CSV";
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.get(0) != Some("frequency_hz") {
        return Err(format_err(KIND, path, "first column must be frequency_hz"));
    }
    let labels: Vec<String> = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_suffix("_db")
                .map(String::from)
                .ok_or_else(|| format_err(KIND, path, format!("column `{h}` lacks the _db suffix")))
        })
        .collect::<Result<_>>()?;
    let mut table = PsdTable::new(Vec::new());
    table.columns = labels.into_iter().map(|l| (l, Vec::new())).collect();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        table.frequencies.push(parse_f64(KIND, path, &row[0])?);
        for (i, (_, col)) in table.columns.iter_mut().enumerate() {
            col.push(parse_f64(KIND, path, &row[i + 1])?);
        }
    }
    Ok(table)
}
