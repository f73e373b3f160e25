//! Tuning-curve CSV: header `neuron_id,x,y,z,r0,…,r{s−1}`, one neuron per row.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use qfnet::TuningCurve;

use crate::error::{PipelineError, Result, Stage};

fn bad(line: u64, msg: impl std::fmt::Display) -> PipelineError {
    PipelineError::data(Stage::Ingest, format!("line {line}: {msg}"))
}

pub fn ingest_csv(path: &Path) -> Result<Vec<TuningCurve>> {
    let file = std::fs::File::open(path).map_err(|e| PipelineError::io(Stage::Ingest, path, e))?;
    parse_curves(file)
}

pub fn parse_curves(input: impl Read) -> Result<Vec<TuningCurve>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| bad(e.position().map_or(1, |p| p.line()), e))?,
        None => return Err(PipelineError::data(Stage::Ingest, "empty file")),
    };
    let header_line = header.position().map_or(1, |p| p.line());
    let fields: Vec<&str> = header.iter().collect();
    if fields.len() < 6 || fields[..4] != ["neuron_id", "x", "y", "z"] {
        return Err(bad(
            header_line,
            "header must be neuron_id,x,y,z followed by at least r0,r1",
        ));
    }
    let stimuli = fields.len() - 4;
    for (k, name) in fields[4..].iter().enumerate() {
        if *name != format!("r{k}") {
            return Err(bad(
                header_line,
                format!("expected column r{k}, found {name:?}"),
            ));
        }
    }

    let mut curves = Vec::new();
    let mut seen = HashSet::new();
    for record in records {
        let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != stimuli + 4 {
            return Err(bad(
                line,
                format!("expected {} fields, found {}", stimuli + 4, record.len()),
            ));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(bad(line, "empty neuron_id"));
        }
        if !seen.insert(id.clone()) {
            return Err(bad(line, format!("duplicate neuron_id {id:?}")));
        }
        let mut numbers = Vec::with_capacity(stimuli + 3);
        for (col, field) in record.iter().enumerate().skip(1) {
            let v: f64 = field.parse().map_err(|_| {
                bad(
                    line,
                    format!("column {}: not a number: {field:?}", fields[col]),
                )
            })?;
            if !v.is_finite() {
                return Err(bad(
                    line,
                    format!("column {}: non-finite value", fields[col]),
                ));
            }
            numbers.push(v);
        }
        curves.push(TuningCurve::new(
            id,
            [numbers[0], numbers[1], numbers[2]],
            numbers[3..].to_vec(),
        ));
    }
    if curves.is_empty() {
        return Err(PipelineError::data(Stage::Ingest, "no data rows"));
    }
    Ok(curves)
}

/// Inverse of [`parse_curves`]; floats use the shortest round-trip form.
pub fn write_curves(curves: &[TuningCurve]) -> String {
    let mut out = String::from("neuron_id,x,y,z");
    let stimuli = curves.first().map_or(0, |c| c.responses.len());
    for k in 0..stimuli {
        let _ = write!(out, ",r{k}");
    }
    out.push('\n');
    for c in curves {
        out.push_str(&c.neuron_id);
        for v in c.position.iter().chain(&c.responses) {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    out
}
