use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::AxisSample;

/// One line of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub step: u64,
    pub h: f64,
    pub v: f64,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

/// Per-step axis input. Steps not listed read as `(0, 0)`.
///
/// Record `k` is the input for the step that starts at `t = k * dt`, i.e. the
/// one that produces trajectory record `k + 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputTrace {
    records: BTreeMap<u64, AxisSample>,
}

impl InputTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a trace; values are clamped, later duplicates win.
    pub fn from_records(records: impl IntoIterator<Item = TraceRecord>) -> Self {
        let mut t = Self::new();
        for r in records {
            t.set(r.step, AxisSample::new(r.h, r.v));
        }
        t
    }

    /// Holds `axes` over `steps` (half-open).
    pub fn hold(mut self, steps: std::ops::Range<u64>, axes: AxisSample) -> Self {
        for s in steps {
            self.set(s, axes);
        }
        self
    }

    pub fn set(&mut self, step: u64, axes: AxisSample) {
        let a = AxisSample::new(axes.h, axes.v);
        if a == AxisSample::default() {
            self.records.remove(&step);
        } else {
            self.records.insert(step, a);
        }
    }

    pub fn at(&self, step: u64) -> AxisSample {
        self.records.get(&step).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_step(&self) -> Option<u64> {
        self.records.keys().next_back().copied()
    }

    pub fn records(&self) -> impl Iterator<Item = TraceRecord> + '_ {
        self.records.iter().map(|(&step, a)| TraceRecord { step, h: a.h, v: a.v })
    }

    /// Parses line-delimited records. Blank lines are skipped; steps must be
    /// strictly increasing.
    pub fn parse_jsonl(text: &str) -> Result<Self, TraceError> {
        let mut t = Self::new();
        let mut last: Option<u64> = None;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| TraceError::Line { line: i + 1, message };
            let r: TraceRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            if !r.h.is_finite() || !r.v.is_finite() {
                return Err(bad("axis values must be finite".into()));
            }
            if last.is_some_and(|l| r.step <= l) {
                return Err(bad(format!("step {} is not after step {}", r.step, last.unwrap_or(0))));
            }
            last = Some(r.step);
            t.set(r.step, AxisSample::new(r.h, r.v));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, TraceError> {
        let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_jsonl(&text)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r).expect("trace record serializes"));
            out.push('\n');
        }
        out
    }
}
