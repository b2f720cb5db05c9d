//! CSV time series and binary field snapshots.
//!
//! CSV header: `step,time,sup_norm,original_energy,modified_energy,aux,g,mbp_ok,diverged`.
//! Floats use 17 significant digits (`{:.16e}`); `g` is empty for SAV runs.
//!
//! Snapshot layout, little-endian: magic `ACFD`, format version `u32 = 1`,
//! `M: u32` twice, `time: f64`, then `M * M` `f64` values row-major.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::diagnostics::StepDiagnostics;
use crate::error::{Error, Result};
use crate::grid::Field;

pub const CSV_HEADER: &str =
    "step,time,sup_norm,original_energy,modified_energy,aux,g,mbp_ok,diverged";

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"ACFD";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(row: &StepDiagnostics) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.step,
        fmt_float(row.time),
        fmt_float(row.sup_norm),
        fmt_float(row.original_energy),
        fmt_float(row.modified_energy),
        fmt_float(row.aux),
        row.g.map(fmt_float).unwrap_or_default(),
        row.mbp_ok,
        row.diverged
    )
}

pub fn write_csv_to(out: &mut impl Write, rows: &[StepDiagnostics]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_row(row))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_csv(path: &Path, rows: &[StepDiagnostics]) -> Result<()> {
    let mut w = create(path)?;
    write_csv_to(&mut w, rows)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Writes an arbitrary table: header line plus pre-formatted rows.
pub fn write_table(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut w = create(path)?;
    let mut go = || -> std::io::Result<()> {
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()
    };
    go().map_err(|e| Error::io(path, e))
}

pub fn encode_snapshot(field: &Field, time: f64) -> Vec<u8> {
    let m = field.grid().points() as u32;
    let mut buf = Vec::with_capacity(24 + 8 * field.values().len());
    buf.extend_from_slice(&SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&m.to_le_bytes());
    buf.extend_from_slice(&m.to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

/// Decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub points: usize,
    pub time: f64,
    pub values: Vec<f64>,
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let bad = |msg: &str| Error::Snapshot(msg.to_string());
    if bytes.len() < 24 {
        return Err(bad("truncated header"));
    }
    if bytes[0..4] != SNAPSHOT_MAGIC {
        return Err(bad("wrong magic"));
    }
    let u32_at = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let (m1, m2) = (u32_at(8) as usize, u32_at(12) as usize);
    if m1 != m2 {
        return Err(Error::Snapshot(format!("non-square grid {m1}x{m2}")));
    }
    let time = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let body = &bytes[24..];
    if body.len() != 8 * m1 * m2 {
        return Err(Error::Snapshot(format!(
            "expected {} value bytes, found {}",
            8 * m1 * m2,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Snapshot {
        points: m1,
        time,
        values,
    })
}

pub fn write_snapshot(path: &Path, field: &Field, time: f64) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(&encode_snapshot(field, time))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}
