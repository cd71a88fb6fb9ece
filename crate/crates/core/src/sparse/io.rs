//! Text interchange format, one sample per line:
//!
//! ```text
//! #o=6 m=3
//! 2 0:1 5:1
//! 0
//! 1 3:1
//! ```
//!
//! The header declares the feature count `o` and class count `m`. Indices
//! are zero-based, strictly ascending, and always carry the value `1`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{SparseDataset, SparseRow};
use crate::error::{Result, StmError};

fn parse_err(line: usize, message: impl Into<String>) -> StmError {
    StmError::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Option<(u32, u32)> {
    let rest = line.strip_prefix('#')?;
    let mut o = None;
    let mut m = None;
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=')?;
        match key {
            "o" => o = Some(value.parse().ok()?),
            "m" => m = Some(value.parse().ok()?),
            _ => return None,
        }
    }
    Some((o?, m?))
}

fn parse_line(line: &str, lineno: usize, o: u32, m: u32) -> Result<(SparseRow, u32)> {
    let mut fields = line.split_whitespace();
    let label_str = fields.next().ok_or_else(|| parse_err(lineno, "missing label"))?;
    let label: u32 =
        label_str.parse().map_err(|_| parse_err(lineno, format!("bad label {label_str:?}")))?;
    if label >= m {
        return Err(parse_err(lineno, format!("label {label} out of range for m={m}")));
    }

    let mut indices = Vec::new();
    for field in fields {
        let (idx, val) =
            field.split_once(':').ok_or_else(|| parse_err(lineno, format!("expected idx:1, got {field:?}")))?;
        let idx: u32 = idx.parse().map_err(|_| parse_err(lineno, format!("bad index {idx:?}")))?;
        if val != "1" {
            return Err(parse_err(lineno, format!("feature {idx} has value {val:?}, only 1 is allowed")));
        }
        if idx >= o {
            return Err(parse_err(lineno, format!("index {idx} out of range for o={o}")));
        }
        if let Some(&prev) = indices.last() {
            if idx == prev {
                return Err(parse_err(lineno, format!("duplicate index {idx}")));
            }
            if idx < prev {
                return Err(parse_err(lineno, format!("index {idx} follows {prev}; indices must ascend")));
            }
        }
        indices.push(idx);
    }
    Ok((SparseRow(indices), label))
}

/// Parses the sparse text format from any buffered reader.
pub fn read_sparse<R: BufRead>(reader: R) -> Result<SparseDataset> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(parse_err(1, "missing header")),
    };
    let (o, m) = parse_header(header.trim())
        .ok_or_else(|| parse_err(1, format!("expected header '#o=<features> m=<classes>', got {header:?}")))?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (row, label) = parse_line(&line, i + 2, o, m)?;
        rows.push(row);
        labels.push(label);
    }
    SparseDataset::new(rows, labels, o, m)
}

pub fn write_sparse<W: Write>(ds: &SparseDataset, mut writer: W) -> Result<()> {
    writeln!(writer, "#o={} m={}", ds.feature_count(), ds.class_count())?;
    for (row, label) in ds.iter() {
        write!(writer, "{label}")?;
        for idx in row.indices() {
            write!(writer, " {idx}:1")?;
        }
        writeln!(writer)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn load_sparse_file<P: AsRef<Path>>(path: P) -> Result<SparseDataset> {
    read_sparse(BufReader::new(File::open(path)?))
}

pub fn save_sparse_file<P: AsRef<Path>>(ds: &SparseDataset, path: P) -> Result<()> {
    write_sparse(ds, BufWriter::new(File::create(path)?))
}
