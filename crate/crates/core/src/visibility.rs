//! Natural visibility graphs.
//!
//! Samples `(t_a, y_a)` and `(t_b, y_b)` are linked when every sample
//! strictly between them lies strictly below the segment joining them. A
//! collinear intermediate blocks the link. All comparisons are plain `f64`
//! arithmetic with no tolerance.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::TimeSeries;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("series has {0} samples; at least 2 are needed")]
    TooShort(usize),
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({a}, {b}) references a node outside 0..{node_count}")]
    NodeOutOfRange {
        a: usize,
        b: usize,
        node_count: usize,
    },
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Row scan keeping the running maximum slope from each source sample.
    #[default]
    Quadratic,
    /// Recursion around the maximum of each sub-interval.
    DivideAndConquer,
}

/// A simple undirected graph over node indices `0..node_count`, stored as
/// sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl VisibilityGraph {
    /// Builds a graph from an arbitrary edge list. Duplicate edges are merged.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut neighbors = vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            if a >= node_count || b >= node_count {
                return Err(GraphError::NodeOutOfRange { a, b, node_count });
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        Ok(Self::from_neighbor_lists(neighbors))
    }

    fn from_neighbor_lists(mut neighbors: Vec<Vec<usize>>) -> Self {
        let mut twice = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Self {
            neighbors,
            edge_count: twice / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors
            .get(a)
            .is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Edges `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(a, list)| {
            let start = list.partition_point(|&b| b <= a);
            list[start..].iter().map(move |&b| (a, b))
        })
    }

    /// Number of connected components (breadth-first search).
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for root in 0..n {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    /// Text edge list: one `a b` pair per line, `a < b`, ascending.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(out, "{a} {b}")?;
        }
        out.flush()
    }

    /// Reads an edge list. Blank lines and lines starting with `#` are
    /// ignored. Without an explicit `node_count` the graph spans
    /// `0..=max index`.
    pub fn read_edge_list<R: BufRead>(
        input: R,
        node_count: Option<usize>,
    ) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut max_index = None;
        for (k, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse {
                line: k + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            let mut next = || -> Result<usize, GraphError> {
                let f = fields
                    .next()
                    .ok_or_else(|| parse_err("expected two node indices".into()))?;
                f.parse()
                    .map_err(|_| parse_err(format!("`{f}` is not a node index")))
            };
            let (a, b) = (next()?, next()?);
            if fields.next().is_some() {
                return Err(parse_err("trailing fields".into()));
            }
            max_index = max_index.max(Some(a.max(b)));
            edges.push((a, b));
        }
        let n = node_count.unwrap_or_else(|| max_index.map_or(0, |m| m + 1));
        Self::from_edges(n, edges)
    }

    /// Graphviz DOT rendering; layout is left to the viewer.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph visibility {\n");
        for v in 0..self.node_count() {
            let _ = writeln!(s, "  {v};");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }
}

/// True iff sample `r` lies strictly below the segment from `i` to `j`.
fn below_segment(y: &[f64], t: impl Fn(usize) -> f64, i: usize, r: usize, j: usize) -> bool {
    y[r] < y[j] + (y[i] - y[j]) * (t(j) - t(r)) / (t(j) - t(i))
}

/// Whether samples `i < j` see each other, evaluated directly from the
/// line inequality over every intermediate sample.
///
/// # Panics
/// If `i >= j` or `j` is out of range.
pub fn visible(ts: &TimeSeries, i: usize, j: usize) -> bool {
    assert!(
        i < j && j < ts.len(),
        "visible({i}, {j}) requires i < j < {}",
        ts.len()
    );
    let t = |k: usize| ts.time(k) as f64;
    (i + 1..j).all(|r| below_segment(ts.values(), t, i, r, j))
}

pub fn build_visibility_graph(
    ts: &TimeSeries,
    method: Method,
) -> Result<VisibilityGraph, GraphError> {
    if ts.len() < 2 {
        return Err(GraphError::TooShort(ts.len()));
    }
    let y = ts.values();
    let forward = match method {
        Method::Quadratic => quadratic_rows(y),
        Method::DivideAndConquer => divide_and_conquer_rows(y),
    };
    let mut neighbors = forward.clone();
    for (a, row) in forward.iter().enumerate() {
        for &b in row {
            neighbors[b].push(a);
        }
    }
    Ok(VisibilityGraph::from_neighbor_lists(neighbors))
}

#[inline]
fn slope(y: &[f64], a: usize, b: usize) -> f64 {
    (y[b] - y[a]) / (b - a) as f64
}

/// For each `i`, the later samples visible from `i`. Sample `j` is visible
/// iff its slope from `i` beats every earlier slope in the row.
fn quadratic_rows(y: &[f64]) -> Vec<Vec<usize>> {
    (0..y.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            let mut best = f64::NEG_INFINITY;
            for j in i + 1..y.len() {
                let s = slope(y, i, j);
                if s > best {
                    row.push(j);
                    best = s;
                }
            }
            row
        })
        .collect()
}

/// The maximum of an interval blocks every pair straddling it, so only pairs
/// incident to it are scanned before recursing into both sides.
fn divide_and_conquer_rows(y: &[f64]) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::new(); y.len()];
    let mut stack = vec![(0usize, y.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        let top = (lo..=hi)
            .reduce(|m, k| if y[k] > y[m] { k } else { m })
            .expect("non-empty interval");

        let mut best = f64::NEG_INFINITY;
        for j in top + 1..=hi {
            let s = slope(y, top, j);
            if s > best {
                rows[top].push(j);
                best = s;
            }
        }
        let mut lowest = f64::INFINITY;
        for j in (lo..top).rev() {
            let s = slope(y, j, top);
            if s < lowest {
                rows[j].push(top);
                lowest = s;
            }
        }

        if top > lo + 1 {
            stack.push((lo, top - 1));
        }
        if top + 1 < hi {
            stack.push((top + 1, hi));
        }
    }
    rows
}
