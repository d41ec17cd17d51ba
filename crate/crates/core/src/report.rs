//! Versioned JSON analysis reports and side-by-side comparison tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::q_analysis::{Characterisers, StructureVectorSet};
use crate::series::{LogisticParams, TimeSeries};

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept for real-valued report fields.
pub const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report `{name}` has schema version {found}, expected {expected}")]
    SchemaMismatch {
        name: String,
        found: u32,
        expected: u32,
    },
    #[error("comparison needs at least 2 reports, got {0}")]
    TooFewReports(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits so values print and
/// re-parse identically.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub length: usize,
    #[serde(default)]
    pub start_index: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<LogisticParams>,
    /// Offsets where concatenated blocks meet.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seams: Vec<usize>,
}

impl InputDescriptor {
    pub fn for_series(source: impl Into<String>, ts: &TimeSeries) -> Self {
        Self {
            source: source.into(),
            label: ts.label().map(str::to_string),
            length: ts.len(),
            start_index: ts.start_index(),
            parameters: None,
            seams: ts.seams().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
}

/// Wall-clock time per pipeline stage, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub visibility: f64,
    pub cliques: f64,
    pub analysis: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub graph: GraphStats,
    pub q_max: usize,
    pub simplices: usize,
    #[serde(flatten)]
    pub vectors: StructureVectorSet,
    /// Topological entropy per level.
    #[serde(rename = "S")]
    pub entropy: Vec<f64>,
    pub max_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_dims: Option<Vec<usize>>,
    pub timing_ms: Timing,
}

impl AnalysisReport {
    pub fn new(
        input: InputDescriptor,
        graph: GraphStats,
        analysis: &Characterisers,
        include_node_dims: bool,
        timing: Timing,
    ) -> Self {
        let mut vectors = analysis.vectors.clone();
        vectors.qhat.iter_mut().for_each(|x| *x = round_sig(*x));
        Self {
            schema_version: SCHEMA_VERSION,
            input,
            graph,
            q_max: analysis.q_max,
            simplices: analysis.simplex_count,
            vectors,
            entropy: analysis.entropy.iter().map(|&s| round_sig(s)).collect(),
            max_dim: analysis.nodes.max_dim,
            node_dims: include_node_dims.then(|| analysis.nodes.dim.clone()),
            timing_ms: Timing {
                visibility: round_sig(timing.visibility),
                cliques: round_sig(timing.cliques),
                analysis: round_sig(timing.analysis),
                total: round_sig(timing.total),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// JSON with timing zeroed; identical inputs give identical canon.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.timing_ms = Timing::default();
        r.to_json()
    }

    /// Entropy at level `q`, 0 above `q_max`.
    pub fn entropy_at(&self, q: usize) -> f64 {
        self.entropy.get(q).copied().unwrap_or(0.0)
    }

    fn count_at(v: &[usize], q: usize) -> usize {
        v.get(q).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub max_dim: f64,
    pub entropy: Vec<f64>,
    pub f: Vec<f64>,
    pub q: Vec<f64>,
}

impl ComparisonRow {
    fn minus(&self, base: &ComparisonRow) -> ComparisonRow {
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        ComparisonRow {
            name: self.name.clone(),
            max_dim: self.max_dim - base.max_dim,
            entropy: sub(&self.entropy, &base.entropy),
            f: sub(&self.f, &base.f),
            q: sub(&self.q, &base.q),
        }
    }

    fn cells(&self) -> Vec<String> {
        let mut out = vec![self.name.clone(), fmt_num(self.max_dim)];
        out.extend(self.entropy.iter().map(|&x| fmt_num(x)));
        out.extend(self.f.iter().map(|&x| fmt_num(x)));
        out.extend(self.q.iter().map(|&x| fmt_num(x)));
        out
    }
}

fn fmt_num(x: f64) -> String {
    // Avoid "-0" in delta columns.
    format!("{}", round_sig(x) + 0.0)
}

/// Reports side by side: `max_dim`, `S(q)`, `f(q)` and `Q(q)` per report,
/// plus differences from the first report. Levels above a report's `q_max`
/// hold zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub levels: usize,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn from_reports(
        reports: &[(String, AnalysisReport)],
        min_levels: usize,
    ) -> Result<Self, ReportError> {
        if reports.len() < 2 {
            return Err(ReportError::TooFewReports(reports.len()));
        }
        if let Some((name, r)) = reports
            .iter()
            .find(|(_, r)| r.schema_version != SCHEMA_VERSION)
        {
            return Err(ReportError::SchemaMismatch {
                name: name.clone(),
                found: r.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let levels = reports
            .iter()
            .map(|(_, r)| r.q_max + 1)
            .max()
            .unwrap_or(0)
            .max(min_levels);
        let rows = reports
            .iter()
            .map(|(name, r)| ComparisonRow {
                name: name.clone(),
                max_dim: r.max_dim as f64,
                entropy: (0..levels).map(|q| r.entropy_at(q)).collect(),
                f: (0..levels)
                    .map(|q| AnalysisReport::count_at(&r.vectors.f, q) as f64)
                    .collect(),
                q: (0..levels)
                    .map(|q| AnalysisReport::count_at(&r.vectors.q, q) as f64)
                    .collect(),
            })
            .collect();
        Ok(Self { levels, rows })
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["report".to_string(), "max_dim".to_string()];
        for prefix in ["S", "f", "Q"] {
            h.extend((0..self.levels).map(|q| format!("{prefix}({q})")));
        }
        h
    }

    /// Row-wise differences from the first row.
    pub fn deltas(&self) -> Vec<ComparisonRow> {
        let base = &self.rows[0];
        self.rows.iter().map(|r| r.minus(base)).collect()
    }

    /// Plot-ready CSV: value columns followed by `delta_`-prefixed columns.
    pub fn to_csv(&self) -> String {
        let header = self.header();
        let mut line: Vec<String> = header.clone();
        line.extend(header[1..].iter().map(|h| format!("delta_{h}")));
        let mut out = line.join(",") + "\n";
        for (row, delta) in self.rows.iter().zip(self.deltas()) {
            let mut cells = row.cells();
            cells.extend(delta.cells().into_iter().skip(1));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Aligned text table followed by a block of differences from the
    /// first report.
    pub fn to_text(&self) -> String {
        let header = self.header();
        let values: Vec<Vec<String>> = self.rows.iter().map(ComparisonRow::cells).collect();
        let deltas: Vec<Vec<String>> = self.deltas().iter().map(ComparisonRow::cells).collect();
        let mut widths: Vec<usize> = header.iter().map(String::len).collect();
        for cells in values.iter().chain(&deltas) {
            for (w, c) in widths.iter_mut().zip(cells) {
                *w = (*w).max(c.len());
            }
        }
        let render = |cells: &[String], out: &mut String| {
            let line: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        };
        let mut out = String::new();
        render(&header, &mut out);
        for cells in &values {
            render(cells, &mut out);
        }
        let _ = writeln!(out, "\ndifference from {}", self.rows[0].name);
        for cells in &deltas {
            render(cells, &mut out);
        }
        out
    }
}
