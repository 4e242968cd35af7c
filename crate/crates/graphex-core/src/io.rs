//! Edge-list and trace ingestion, plus result persistence.
//!
//! The edge-list format is SNAP-compatible: whitespace-separated vertex-id
//! pairs, `#` comment lines, duplicates and reversed duplicates collapsing
//! to one undirected edge, self-pairs kept as self-loops. Traces are lines
//! `t u v` with a real-valued timestamp. Tokens may be arbitrary
//! non-whitespace strings; internal ids are assigned densely in
//! first-appearance order so parses are deterministic.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::experiments::ResultTable;
use crate::graph::{UndirectedGraph, VertexId};
use crate::theory::BiasDiagnostics;

/// A parsed graph with its token-to-internal-id mapping retained
/// (`labels[id]` is the original token).
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: UndirectedGraph,
    pub labels: Vec<String>,
}

struct IdInterner {
    map: HashMap<String, VertexId>,
    labels: Vec<String>,
}

impl IdInterner {
    fn new() -> Self {
        IdInterner {
            map: HashMap::new(),
            labels: Vec::new(),
        }
    }

    fn intern(&mut self, token: &str) -> VertexId {
        if let Some(&id) = self.map.get(token) {
            return id;
        }
        let id = self.labels.len() as VertexId;
        self.map.insert(token.to_string(), id);
        self.labels.push(token.to_string());
        id
    }
}

/// Parse a SNAP-style undirected edge list.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedGraph> {
    let mut interner = IdInterner::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let a = interner.intern(tokens[0]);
        let b = interner.intern(tokens[1]);
        edges.push((a, b));
    }
    Ok(ParsedGraph {
        graph: UndirectedGraph::from_edges(edges),
        labels: interner.labels,
    })
}

/// Write a graph in the edge-list format, one canonical `a b` pair per
/// line in sorted order (byte-stable for identical graphs).
pub fn write_edge_list<W: Write>(graph: &UndirectedGraph, mut writer: W) -> Result<()> {
    for (a, b) in graph.edges() {
        writeln!(writer, "{a} {b}")?;
    }
    Ok(())
}

/// One timestamped interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub u: VertexId,
    pub v: VertexId,
}

/// A time-sorted stream of interactions; duplicate pairs are retained
/// (snapshot construction dedups).
#[derive(Debug, Clone)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub labels: Vec<String>,
}

/// Parse `t u v` lines and sort stably by timestamp.
pub fn parse_trace<R: BufRead>(reader: R) -> Result<Trace> {
    let mut interner = IdInterner::new();
    let mut events: Vec<TraceEvent> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 3 tokens, found {}", tokens.len()),
            });
        }
        let time: f64 = tokens[0].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("non-numeric timestamp '{}'", tokens[0]),
        })?;
        if !time.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("non-finite timestamp '{}'", tokens[0]),
            });
        }
        let u = interner.intern(tokens[1]);
        let v = interner.intern(tokens[2]);
        events.push(TraceEvent { time, u, v });
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(Trace {
        events,
        labels: interner.labels,
    })
}

/// Graph of unique edges with timestamp <= t.
pub fn snapshot(trace: &Trace, t: f64) -> UndirectedGraph {
    UndirectedGraph::from_edges(
        trace
            .events
            .iter()
            .take_while(|ev| ev.time <= t)
            .map(|ev| (ev.u, ev.v)),
    )
}

/// CSV rendering of a result table: one row per (key, estimator, metric).
/// Floats print in shortest round-trip form.
pub fn write_result_csv<W: Write>(table: &ResultTable, mut writer: W) -> Result<()> {
    writeln!(writer, "size,estimator,metric,value,stderr,n_reps")?;
    for row in &table.rows {
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            row.key, row.estimator, row.metric, row.value, row.stderr, row.n_reps
        )?;
    }
    Ok(())
}

/// JSON rendering with the full config embedded for provenance.
pub fn write_result_json<W: Write>(table: &ResultTable, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, table)?;
    Ok(())
}

/// CSV rendering of the regular-variation diagnostics.
pub fn write_bias_csv<W: Write>(diag: &BiasDiagnostics, mut writer: W) -> Result<()> {
    writeln!(writer, "size,gamma,bias,loglog_slope")?;
    for ((size, gamma), bias) in diag
        .sizes
        .iter()
        .zip(&diag.gamma_values)
        .zip(&diag.bias_values)
    {
        writeln!(writer, "{size},{gamma},{bias},{}", diag.loglog_slope)?;
    }
    Ok(())
}
