//! Machine-readable emission of traces, fronts and lineage.
//!
//! CSV floats are rendered with 17 significant digits so a parsed-back trace
//! equals the in-memory one exactly; JSON mirrors the same field names.

use std::io::Write;

use crate::algorithms::{IterationRecord, LineageEdge};
use crate::error::{Error, Result};
use crate::protocol::format_float;
use crate::types::ParetoList;

/// Output encoding for trace/front/lineage files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

const TRACE_COLUMNS: &str = "k,list_size,delta_bar,xi,hi,phi_delta,phi_xi,nf_cum,success,selected_id";
const CRITICALITY_COLUMNS: &str = ",gamma_max,gamma_min";

/// Writes the trace; `with_criticality` appends the `gamma_max,gamma_min`
/// columns. An empty trace yields a header-only CSV.
pub fn emit_trace(
    trace: &[IterationRecord],
    format: OutputFormat,
    with_criticality: bool,
    mut w: impl Write,
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, trace).map_err(std::io::Error::other)?;
            writeln!(w)?;
        }
        OutputFormat::Csv => {
            if with_criticality {
                writeln!(w, "{TRACE_COLUMNS}{CRITICALITY_COLUMNS}")?;
            } else {
                writeln!(w, "{TRACE_COLUMNS}")?;
            }
            for r in trace {
                let selected = r
                    .selected_id
                    .map(|id| id.to_string())
                    .unwrap_or_default();
                write!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.k,
                    r.list_size,
                    format_float(r.delta_bar),
                    format_float(r.xi),
                    format_float(r.hi),
                    format_float(r.phi_delta),
                    format_float(r.phi_xi),
                    r.nf_cum,
                    r.success,
                    selected
                )?;
                if with_criticality {
                    let g = |v: Option<f64>| v.map(format_float).unwrap_or_default();
                    write!(w, ",{},{}", g(r.gamma_max), g(r.gamma_min))?;
                }
                writeln!(w)?;
            }
        }
    }
    Ok(())
}

/// Parses a CSV trace produced by [`emit_trace`] back into records.
pub fn parse_trace_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty trace file".into()))?;
    let with_criticality = match header {
        h if h == TRACE_COLUMNS => false,
        h if h == format!("{TRACE_COLUMNS}{CRITICALITY_COLUMNS}") => true,
        other => {
            return Err(Error::Config(format!(
                "unexpected trace header {other:?}"
            )))
        }
    };
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if with_criticality { 12 } else { 10 };
        if fields.len() != expected {
            return Err(Error::Config(format!(
                "trace line {} has {} fields, expected {expected}",
                lineno + 2,
                fields.len()
            )));
        }
        let float = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad float {s:?} in trace")))
        };
        let int = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| Error::Config(format!("bad integer {s:?} in trace")))
        };
        let opt_float = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                float(s).map(Some)
            }
        };
        records.push(IterationRecord {
            k: int(fields[0])?,
            list_size: int(fields[1])? as usize,
            delta_bar: float(fields[2])?,
            xi: float(fields[3])?,
            hi: float(fields[4])?,
            phi_delta: float(fields[5])?,
            phi_xi: float(fields[6])?,
            nf_cum: int(fields[7])?,
            success: fields[8]
                .parse::<bool>()
                .map_err(|_| Error::Config(format!("bad boolean {:?} in trace", fields[8])))?,
            selected_id: if fields[9].is_empty() {
                None
            } else {
                Some(int(fields[9])?)
            },
            gamma_max: if with_criticality {
                opt_float(fields[10])?
            } else {
                None
            },
            gamma_min: if with_criticality {
                opt_float(fields[11])?
            } else {
                None
            },
        });
    }
    Ok(records)
}

/// Writes the final front: one row per entry with its decision coordinates,
/// objectives and per-direction stepsizes.
pub fn emit_front(front: &ParetoList, format: OutputFormat, mut w: impl Write) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = front
                .entries()
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "id": e.id.0,
                        "parent_id": e.parent_id.map(|p| p.0),
                        "born_iter": e.born_iter,
                        "x": e.point.coords(),
                        "f": e.objectives.values(),
                        "alpha": e.steps.alphas(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows).map_err(std::io::Error::other)?;
            writeln!(w)?;
        }
        OutputFormat::Csv => {
            let (n, q, r) = front
                .entries()
                .first()
                .map(|e| (e.point.dim(), e.objectives.len(), e.steps.len()))
                .unwrap_or((0, 0, 0));
            let mut header = String::from("id,parent_id,born_iter");
            for j in 0..n {
                header.push_str(&format!(",x{j}"));
            }
            for j in 0..q {
                header.push_str(&format!(",f{j}"));
            }
            for j in 0..r {
                header.push_str(&format!(",alpha{j}"));
            }
            writeln!(w, "{header}")?;
            for e in front.entries() {
                let parent = e.parent_id.map(|p| p.0.to_string()).unwrap_or_default();
                write!(w, "{},{},{}", e.id.0, parent, e.born_iter)?;
                for v in e
                    .point
                    .coords()
                    .iter()
                    .chain(e.objectives.values())
                    .chain(e.steps.alphas())
                {
                    write!(w, ",{}", format_float(*v))?;
                }
                writeln!(w)?;
            }
        }
    }
    Ok(())
}

/// Writes the lineage edge list (`child,parent`).
pub fn emit_lineage(edges: &[LineageEdge], format: OutputFormat, mut w: impl Write) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, edges).map_err(std::io::Error::other)?;
            writeln!(w)?;
        }
        OutputFormat::Csv => {
            writeln!(w, "child,parent")?;
            for e in edges {
                writeln!(w, "{},{}", e.child, e.parent)?;
            }
        }
    }
    Ok(())
}
