//! Maximal clique enumeration. Each maximal clique of `k` vertices is a
//! simplex of dimension `k - 1` in the clique complex.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::visibility::VisibilityGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueError {
    #[error("brute-force enumeration is limited to {limit} nodes, graph has {nodes}")]
    OracleTooLarge { nodes: usize, limit: usize },
    #[error("simplex references node {node} outside 0..{node_count}")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("empty simplex")]
    EmptySimplex,
}

/// Maximal cliques in canonical order: vertices ascending within each
/// simplex, simplices sorted lexicographically, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueComplex {
    simplices: Vec<Vec<usize>>,
    node_count: usize,
}

impl CliqueComplex {
    /// Canonicalises an arbitrary simplex list over `0..node_count`.
    pub fn from_simplices(
        node_count: usize,
        simplices: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, CliqueError> {
        let mut out = Vec::new();
        for mut s in simplices {
            if s.is_empty() {
                return Err(CliqueError::EmptySimplex);
            }
            s.sort_unstable();
            s.dedup();
            if let Some(&node) = s.last().filter(|&&v| v >= node_count) {
                return Err(CliqueError::NodeOutOfRange { node, node_count });
            }
            out.push(s);
        }
        Ok(Self::canonical(node_count, out))
    }

    fn canonical(node_count: usize, mut simplices: Vec<Vec<usize>>) -> Self {
        simplices.sort_unstable();
        simplices.dedup();
        Self {
            simplices,
            node_count,
        }
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Dimension of each simplex, in simplex order.
    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.simplices.iter().map(|s| s.len() - 1)
    }

    /// Dimension of the largest simplex; `None` for an empty complex.
    pub fn q_max(&self) -> Option<usize> {
        self.dims().max()
    }

    /// One simplex per line, vertices separated by single spaces.
    pub fn write_simplices<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in &self.simplices {
            let mut first = true;
            for v in s {
                if !first {
                    out.write_all(b" ")?;
                }
                write!(out, "{v}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// Bron–Kerbosch with pivoting, driven by a degeneracy ordering. Each
/// vertex of the ordering seeds an independent sub-search (run in
/// parallel); the merged output is sorted into canonical order.
pub fn maximal_cliques(g: &VisibilityGraph) -> CliqueComplex {
    let order = degeneracy_order(g);
    let mut position = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }

    let found: Vec<Vec<usize>> = order
        .par_iter()
        .flat_map_iter(|&v| {
            let (mut later, mut earlier) = (Vec::new(), Vec::new());
            for &w in g.neighbors(v) {
                if position[w] > position[v] {
                    later.push(w);
                } else {
                    earlier.push(w);
                }
            }
            let mut out = Vec::new();
            let mut clique = vec![v];
            expand(g, &mut clique, later, earlier, &mut out);
            out
        })
        .collect();
    CliqueComplex::canonical(g.node_count(), found)
}

/// Reports every maximal clique that contains all of `clique`, some of
/// `candidates` and none of `excluded`. Both sets are kept sorted.
fn expand(
    g: &VisibilityGraph,
    clique: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            let mut s = clique.clone();
            s.sort_unstable();
            out.push(s);
        }
        return;
    }

    // Pivot: most candidates in its neighbourhood, lowest index on ties.
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .map(|u| (intersection_len(&candidates, g.neighbors(u)), u))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, u)| u)
        .expect("candidates non-empty");
    let branches = difference(&candidates, g.neighbors(pivot));

    for v in branches {
        let nv = g.neighbors(v);
        clique.push(v);
        expand(
            g,
            clique,
            intersection(&candidates, nv),
            intersection(&excluded, nv),
            out,
        );
        clique.pop();
        if let Ok(k) = candidates.binary_search(&v) {
            candidates.remove(k);
        }
        if let Err(k) = excluded.binary_search(&v) {
            excluded.insert(k, v);
        }
    }
}

/// Smallest-last ordering: repeatedly removes a vertex of minimum remaining
/// degree.
fn degeneracy_order(g: &VisibilityGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_degree + 1];
    for v in (0..n).rev() {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    while order.len() < n {
        low = low.min(max_degree);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().expect("bucket non-empty");
        // Stale entry left behind by a degree decrement.
        if removed[v] || degree[v] != low {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                degree[w] -= 1;
                buckets[degree[w]].push(w);
                low = low.min(degree[w]);
            }
        }
    }
    order
}

fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Elements of sorted `a` absent from sorted `b`.
fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|v| b.binary_search(v).is_err())
        .collect()
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Exhaustive subset enumeration; a test oracle for [`maximal_cliques`].
pub fn brute_force_cliques(g: &VisibilityGraph) -> Result<CliqueComplex, CliqueError> {
    let n = g.node_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(CliqueError::OracleTooLarge {
            nodes: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // Closed neighbourhood bitmasks.
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &w| m | (1 << w)))
        .collect();
    let members = |mask: u32| (0..n).filter(move |&v| mask & (1 << v) != 0);

    let mut simplices = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let is_clique = members(mask).all(|v| closed[v] & mask == mask);
        if !is_clique {
            continue;
        }
        let extendable = (0..n).any(|w| mask & (1 << w) == 0 && closed[w] & mask == mask);
        if !extendable {
            simplices.push(members(mask).collect());
        }
    }
    Ok(CliqueComplex::canonical(n, simplices))
}
