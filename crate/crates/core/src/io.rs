//! Reading and writing Hermite data.
//!
//! JSON layout:
//! `{"dimension": n, "topology": "open", "samples": [{"point": [..], "tangent": [..]}]}`.
//! The CSV layout has a header row and one row per sample holding the `n`
//! point coordinates followed by the `n` tangent coordinates. CSV carries no
//! topology, so callers pass it in.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};
use crate::types::{HermitePair, HermiteSequence, Topology, UnitVec, Vector};

#[derive(Serialize, Deserialize)]
struct HermiteFile {
    dimension: usize,
    topology: Topology,
    samples: Vec<HermitePair>,
}

pub fn sequence_from_json(text: &str) -> Result<HermiteSequence> {
    let file: HermiteFile = serde_json::from_str(text)?;
    if let Some(bad) = file.samples.iter().find(|s| s.dim() != file.dimension) {
        return Err(HermiteError::DimensionMismatch {
            expected: file.dimension,
            found: bad.dim(),
        });
    }
    HermiteSequence::new(file.samples, file.topology)
}

pub fn sequence_to_json(s: &HermiteSequence) -> Result<String> {
    let file = HermiteFile {
        dimension: s.dim(),
        topology: s.topology(),
        samples: s.pairs().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

pub fn sequence_from_csv<R: Read>(reader: R, topology: Topology) -> Result<HermiteSequence> {
    let rows = read_rows(reader)?;
    let mut pairs = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() % 2 != 0 {
            return Err(HermiteError::Parse(format!(
                "row {}: expected an even number of columns, found {}",
                i + 1,
                row.len()
            )));
        }
        let n = row.len() / 2;
        let point = Vector::from_slice(&row[..n])?;
        let tangent = UnitVec::from_slice(&row[n..])?;
        pairs.push(HermitePair::new(point, tangent)?);
    }
    HermiteSequence::new(pairs, topology)
}

pub fn sequence_to_csv<W: Write>(s: &HermiteSequence, writer: W) -> Result<()> {
    let n = s.dim();
    let mut header: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    header.extend((0..n).map(|i| format!("v{i}")));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(&header)?;
    for pair in s.pairs() {
        let row = pair
            .point
            .as_slice()
            .iter()
            .chain(pair.tangent.as_slice())
            .map(|x| x.to_string());
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Points only: a header row and one row of coordinates per point.
pub fn points_from_csv<R: Read>(reader: R) -> Result<Vec<Vector>> {
    read_rows(reader)?.into_iter().map(Vector::new).collect()
}

pub fn points_to_csv<W: Write>(points: &[Vector], writer: W) -> Result<()> {
    let n = points.first().map_or(2, Vector::dim);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((0..n).map(|i| format!("x{i}")))?;
    for p in points {
        w.write_record(p.as_slice().iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let width = r.headers()?.len();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(HermiteError::Parse(format!(
                "row {}: expected {width} columns, found {}",
                i + 1,
                record.len()
            )));
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    HermiteError::Parse(format!("row {}: not a number: {field:?}", i + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Loads a sequence from `path`, choosing the format by extension (`.csv`
/// or anything else as JSON). `csv_topology` applies to CSV input only.
pub fn read_sequence(path: &Path, csv_topology: Topology) -> Result<HermiteSequence> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        sequence_from_csv(std::fs::File::open(path)?, csv_topology)
    } else {
        sequence_from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn write_sequence(path: &Path, s: &HermiteSequence) -> Result<()> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        sequence_to_csv(s, std::fs::File::create(path)?)
    } else {
        std::fs::write(path, sequence_to_json(s)?)?;
        Ok(())
    }
}
