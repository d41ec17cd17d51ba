//! Time series to natural visibility graphs, their clique complexes, and the
//! Q-analysis characterisers of those complexes: the structure vectors `Q`,
//! `Ns` and `Qhat`, the dimension histogram `f`, per-node topological
//! dimension and per-level topological entropy.
//!
//! ```
//! use tsnet_core::series::{logistic_series, LogisticParams};
//! use tsnet_core::visibility::{build_visibility_graph, Method};
//! use tsnet_core::cliques::maximal_cliques;
//! use tsnet_core::q_analysis::analyze;
//!
//! let ts = logistic_series(&LogisticParams::new(3.566, 512)).unwrap();
//! let graph = build_visibility_graph(&ts, Method::Quadratic).unwrap();
//! let complex = maximal_cliques(&graph);
//! let result = analyze(&complex).unwrap();
//! assert_eq!(result.vectors.q[0], 1);
//! ```

pub mod cliques;
pub mod disjoint_set;
pub mod pipeline;
pub mod q_analysis;
pub mod report;
pub mod series;
pub mod visibility;

pub use cliques::{brute_force_cliques, maximal_cliques, CliqueComplex};
pub use pipeline::{analyze_graph, analyze_series, PipelineError, PipelineOptions};
pub use q_analysis::{analyze, Characterisers, StructureVectorSet};
pub use report::AnalysisReport;
pub use series::{logistic_series, LogisticParams, TimeSeries};
pub use visibility::{build_visibility_graph, Method, VisibilityGraph};
