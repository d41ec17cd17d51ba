//! Series -> visibility graph -> clique complex -> characterisers -> report.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::cliques::{maximal_cliques, CliqueComplex};
use crate::q_analysis::{analyze, Characterisers, QAnalysisError};
use crate::report::{AnalysisReport, GraphStats, InputDescriptor, Timing};
use crate::series::TimeSeries;
use crate::visibility::{build_visibility_graph, GraphError, Method, VisibilityGraph};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("visibility stage: {0}")]
    Visibility(#[from] GraphError),
    #[error("analysis stage: {0}")]
    Analysis(#[from] QAnalysisError),
}

impl PipelineError {
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            PipelineError::Analysis(QAnalysisError::InvariantViolation(_))
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    pub method: Method,
    /// Include per-node topological dimensions in the report.
    pub node_dims: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub graph: VisibilityGraph,
    pub complex: CliqueComplex,
    pub characterisers: Characterisers,
    pub report: AnalysisReport,
}

fn elapsed_ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn analyze_series(
    ts: &TimeSeries,
    input: InputDescriptor,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let start = Instant::now();
    let graph = build_visibility_graph(ts, opts.method)?;
    let visibility = elapsed_ms(start);
    finish(graph, input, opts, start, visibility)
}

/// Runs the pipeline on a pre-built graph, skipping the visibility stage.
pub fn analyze_graph(
    graph: VisibilityGraph,
    input: InputDescriptor,
    opts: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    finish(graph, input, opts, Instant::now(), 0.0)
}

fn finish(
    graph: VisibilityGraph,
    input: InputDescriptor,
    opts: &PipelineOptions,
    start: Instant,
    visibility: f64,
) -> Result<PipelineOutput, PipelineError> {
    let t = Instant::now();
    let complex = maximal_cliques(&graph);
    let cliques = elapsed_ms(t);

    let t = Instant::now();
    let characterisers = analyze(&complex)?;
    characterisers.check_identities(Some(graph.component_count()))?;
    if characterisers.edge_count != graph.edge_count() {
        return Err(QAnalysisError::InvariantViolation(format!(
            "simplices cover {} edges, graph has {}",
            characterisers.edge_count,
            graph.edge_count()
        ))
        .into());
    }
    let analysis = elapsed_ms(t);

    let stats = GraphStats {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
    };
    let timing = Timing {
        visibility,
        cliques,
        analysis,
        total: elapsed_ms(start),
    };
    let report = AnalysisReport::new(input, stats, &characterisers, opts.node_dims, timing);
    Ok(PipelineOutput {
        graph,
        complex,
        characterisers,
        report,
    })
}

/// Analyses independent segments concurrently; results keep input order.
pub fn analyze_segments(
    segments: &[TimeSeries],
    source: &str,
    opts: &PipelineOptions,
) -> Vec<Result<AnalysisReport, PipelineError>> {
    segments
        .par_iter()
        .map(|seg| {
            analyze_series(seg, InputDescriptor::for_series(source, seg), opts).map(|o| o.report)
        })
        .collect()
}
