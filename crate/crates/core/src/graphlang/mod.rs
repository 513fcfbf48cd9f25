//! `.fg` text format for graphs.
//!
//! ```text
//! graph CubeRotator {
//!   node tick : EventTick
//!   node factor : ConstFloat(value=20.0)
//!   exec tick.out -> apply.in
//!   data tick.DeltaSeconds -> mul.a
//! }
//! ```
//!
//! One statement per line, `#` starts a comment, identifiers are
//! case-sensitive. Parsing yields a structurally complete [`Graph`];
//! validation is a separate pass ([`crate::graph::validate`]).

mod json;
mod lexer;
mod parser;
mod serialize;

use std::fmt;

use serde::Serialize;

pub use json::{from_json, to_json, JsonError, FGJSON_FORMAT};
pub use parser::SourceMap;
pub use serialize::serialize;

use crate::graph::{validate, CompiledGraph, DiagCode, Diagnostic, Graph, Location};

/// Maximum number of error diagnostics reported before parsing stops.
pub const MAX_ERRORS: usize = 25;

/// Byte range plus 1-based line/column (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `path:line:col: error[Code]: message`
    pub fn render(&self, path: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!("{path}:{}: {sev}[{}]: {}", self.span, self.code, self.message)
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.code, self.message)
    }
}

/// Byte offset to line/column lookup.
#[derive(Debug, Clone)]
pub struct LineIndex<'a> {
    src: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Self { src, line_starts }
    }

    fn line_col(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.src.len());
        let line = self.line_starts.partition_point(|&s| s <= offset) - 1;
        let start = self.line_starts[line];
        let col = self.src.get(start..offset).map_or(offset - start, |s| s.chars().count());
        (line + 1, col + 1)
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let end = end.max(start);
        let (start_line, start_col) = self.line_col(start);
        let (end_line, end_col) = self.line_col(end);
        SourceSpan {
            start,
            end,
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }
}

/// Parses `.fg` source into a graph.
pub fn parse(source: &str) -> Result<Graph, Vec<ParseDiagnostic>> {
    parse_with_spans(source).map(|(g, _)| g)
}

/// Parses and also returns where each node and wire was written.
pub fn parse_with_spans(source: &str) -> Result<(Graph, SourceMap), Vec<ParseDiagnostic>> {
    let out = parser::parse(source);
    if out.diagnostics.iter().any(ParseDiagnostic::is_error) {
        Err(out.diagnostics)
    } else {
        Ok((out.graph, out.map))
    }
}

/// Byte input: invalid UTF-8 is reported as a syntax error at the first bad byte.
pub fn parse_bytes(bytes: &[u8]) -> Result<Graph, Vec<ParseDiagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => {
            let good = e.valid_up_to();
            let prefix = std::str::from_utf8(&bytes[..good]).expect("valid prefix");
            let idx = LineIndex::new(prefix);
            let mut span = idx.span(good, good);
            span.end = good + e.error_len().unwrap_or(1);
            span.end_col = span.start_col + 1;
            Err(vec![ParseDiagnostic {
                severity: Severity::Error,
                code: DiagCode::SyntaxError,
                message: "input is not valid UTF-8".into(),
                span,
            }])
        }
    }
}

/// Every diagnostic for `source`: parse errors and warnings, then (if the
/// parse succeeded) validation errors located back in the source.
pub fn check_source(source: &str) -> Vec<ParseDiagnostic> {
    let out = parser::parse(source);
    let mut diags = out.diagnostics;
    if diags.iter().any(ParseDiagnostic::is_error) {
        return diags;
    }
    let idx = LineIndex::new(source);
    diags.extend(
        validate(&out.graph)
            .into_iter()
            .map(|d| locate(&d, &out.map, &idx)),
    );
    diags
}

/// Parse, validate and compile. Warnings are dropped on success.
pub fn compile_source(source: &str) -> Result<CompiledGraph, Vec<ParseDiagnostic>> {
    let (graph, map) = parse_with_spans(source)?;
    CompiledGraph::compile(&graph).map_err(|diags| {
        let idx = LineIndex::new(source);
        diags.iter().map(|d| locate(d, &map, &idx)).collect()
    })
}

/// Attaches a source span to a validation diagnostic.
pub fn locate(d: &Diagnostic, map: &SourceMap, idx: &LineIndex<'_>) -> ParseDiagnostic {
    let (s, e) = map.range_of(&d.location);
    ParseDiagnostic {
        severity: Severity::Error,
        code: d.code,
        message: d.message.clone(),
        span: idx.span(s, e),
    }
}

impl SourceMap {
    fn range_of(&self, loc: &Location) -> (usize, usize) {
        match loc {
            Location::Graph => self.graph_name,
            Location::Node { node } => self.node(node).unwrap_or(self.graph_name),
            Location::Pin { node, pin } => self
                .param(node, pin)
                .or_else(|| self.node(node))
                .unwrap_or(self.graph_name),
            Location::ExecWire { index } => self.exec_wires.get(*index).copied().unwrap_or(self.graph_name),
            Location::DataWire { index } => self.data_wires.get(*index).copied().unwrap_or(self.graph_name),
        }
    }
}
