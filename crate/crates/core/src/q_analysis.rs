//! Q-analysis of a clique complex: structure vectors, per-node topological
//! dimension and per-level topological entropy.
//!
//! Levels run from `0` to `q_max`. A simplex of dimension `d` takes part in
//! every level `q <= d` for connectivity (`Q`, `Ns`), but node participation
//! (`Q_q^i`) and the entropy count only simplices of dimension exactly `q`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cliques::CliqueComplex;
use crate::disjoint_set::DisjointSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QAnalysisError {
    #[error("complex has no simplices")]
    EmptyComplex,
    #[error("level {q} is outside 0..={q_max}")]
    LevelOutOfRange { q: usize, q_max: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, QAnalysisError>;

fn top_level(complex: &CliqueComplex) -> Result<usize> {
    complex.q_max().ok_or(QAnalysisError::EmptyComplex)
}

fn check_level(complex: &CliqueComplex, q: usize) -> Result<()> {
    let q_max = top_level(complex)?;
    if q > q_max {
        return Err(QAnalysisError::LevelOutOfRange { q, q_max });
    }
    Ok(())
}

/// q-connected components at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QComponents {
    pub count: usize,
    /// Component of each simplex (in complex order); `None` for simplices
    /// of dimension below the level.
    pub labels: Vec<Option<usize>>,
}

/// Groups the simplices of dimension `>= q` into classes of the transitive
/// closure of "shares at least `q + 1` vertices".
pub fn q_components(complex: &CliqueComplex, q: usize) -> Result<QComponents> {
    check_level(complex, q)?;
    let simplices = complex.simplices();
    let qualifying: Vec<usize> = (0..simplices.len())
        .filter(|&k| simplices[k].len() > q)
        .collect();
    let m = qualifying.len();

    // Vertex -> qualifying simplices containing it (local ids, ascending).
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); complex.node_count()];
    for (local, &k) in qualifying.iter().enumerate() {
        for &v in &simplices[k] {
            incident[v].push(local);
        }
    }

    let mut sets = DisjointSet::new(m);
    if q == 0 {
        for list in &incident {
            for pair in list.windows(2) {
                sets.union(pair[0], pair[1]);
            }
        }
    } else {
        let mut shared = vec![0usize; m];
        let mut touched = Vec::new();
        for (a, &k) in qualifying.iter().enumerate() {
            for &v in &simplices[k] {
                for &b in &incident[v] {
                    if b > a {
                        if shared[b] == 0 {
                            touched.push(b);
                        }
                        shared[b] += 1;
                    }
                }
            }
            for b in touched.drain(..) {
                if shared[b] > q {
                    sets.union(a, b);
                }
                shared[b] = 0;
            }
        }
    }

    let local_labels = sets.labels();
    let mut labels = vec![None; simplices.len()];
    for (local, &k) in qualifying.iter().enumerate() {
        labels[k] = Some(local_labels[local]);
    }
    Ok(QComponents {
        count: sets.count(),
        labels,
    })
}

/// The structure vectors, indexed by level `0..=q_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureVectorSet {
    /// First structure vector: q-connected component counts.
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    /// Second structure vector: simplices of dimension `>= q`.
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    /// Simplices of dimension exactly `q`.
    pub f: Vec<usize>,
    /// Third structure vector `1 - Q/Ns` (0 where `Ns` is 0).
    #[serde(rename = "Qhat")]
    pub qhat: Vec<f64>,
}

pub fn structure_vectors(complex: &CliqueComplex) -> Result<StructureVectorSet> {
    let q_max = top_level(complex)?;
    let mut f = vec![0usize; q_max + 1];
    for d in complex.dims() {
        f[d] += 1;
    }
    let mut ns = f.clone();
    for q in (0..q_max).rev() {
        ns[q] += ns[q + 1];
    }
    let q: Vec<usize> = (0..=q_max)
        .into_par_iter()
        .map(|level| q_components(complex, level).map(|c| c.count))
        .collect::<Result<_>>()?;
    let qhat = q
        .iter()
        .zip(&ns)
        .map(|(&c, &n)| {
            if n == 0 {
                0.0
            } else {
                1.0 - c as f64 / n as f64
            }
        })
        .collect();
    Ok(StructureVectorSet { q, ns, f, qhat })
}

/// Per-node participation in simplices of each exact dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeParticipation {
    /// `by_level[q][i]`: simplices of dimension `q` containing node `i`.
    pub by_level: Vec<Vec<usize>>,
    /// Topological dimension of each node: total simplices containing it.
    pub dim: Vec<usize>,
    pub max_dim: usize,
}

pub fn node_dimensions(complex: &CliqueComplex) -> Result<NodeParticipation> {
    let q_max = top_level(complex)?;
    let n = complex.node_count();
    let mut by_level = vec![vec![0usize; n]; q_max + 1];
    for s in complex.simplices() {
        let row = &mut by_level[s.len() - 1];
        for &v in s {
            row[v] += 1;
        }
    }
    let dim: Vec<usize> = (0..n)
        .map(|i| by_level.iter().map(|r| r[i]).sum())
        .collect();
    let max_dim = dim.iter().copied().max().unwrap_or(0);
    Ok(NodeParticipation {
        by_level,
        dim,
        max_dim,
    })
}

/// Normalised Shannon entropy of a participation histogram. Zero counts
/// are ignored; fewer than two participants gives 0.
pub fn normalized_entropy(counts: &[usize]) -> f64 {
    let active: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64)
        .collect();
    if active.len() <= 1 {
        return 0.0;
    }
    if active.iter().all(|&c| c == active[0]) {
        return 1.0;
    }
    let total: f64 = active.iter().sum();
    let h: f64 = active
        .iter()
        .map(|&c| {
            let p = c / total;
            -p * p.ln()
        })
        .sum();
    (h / (active.len() as f64).ln()).clamp(0.0, 1.0)
}

/// Entropy of node participation in simplices of dimension exactly `q`.
pub fn topological_entropy(complex: &CliqueComplex, q: usize) -> Result<f64> {
    check_level(complex, q)?;
    let mut counts = vec![0usize; complex.node_count()];
    for s in complex.simplices().iter().filter(|s| s.len() == q + 1) {
        for &v in s {
            counts[v] += 1;
        }
    }
    Ok(normalized_entropy(&counts))
}

/// Every characteriser of one complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Characterisers {
    pub q_max: usize,
    pub node_count: usize,
    /// Distinct vertex pairs covered by the simplices; equals the edge
    /// count of the source graph for a clique complex.
    pub edge_count: usize,
    pub simplex_count: usize,
    pub vectors: StructureVectorSet,
    /// Topological entropy per level.
    pub entropy: Vec<f64>,
    pub nodes: NodeParticipation,
}

pub fn analyze(complex: &CliqueComplex) -> Result<Characterisers> {
    let q_max = top_level(complex)?;
    let (vectors, nodes) = rayon::join(|| structure_vectors(complex), || node_dimensions(complex));
    let (vectors, nodes) = (vectors?, nodes?);
    let entropy = nodes
        .by_level
        .iter()
        .map(|c| normalized_entropy(c))
        .collect();

    let mut pairs = HashSet::new();
    for s in complex.simplices() {
        for (k, &a) in s.iter().enumerate() {
            for &b in &s[k + 1..] {
                pairs.insert((a, b));
            }
        }
    }

    Ok(Characterisers {
        q_max,
        node_count: complex.node_count(),
        edge_count: pairs.len(),
        simplex_count: complex.len(),
        vectors,
        entropy,
        nodes,
    })
}

impl Characterisers {
    /// Checks the identities every analysis must satisfy. When the
    /// connected-component count of the source graph is supplied, `Q[0]` is
    /// cross-checked against it and every node must lie in some simplex.
    pub fn check_identities(&self, graph_components: Option<usize>) -> Result<()> {
        let fail = |msg: String| Err(QAnalysisError::InvariantViolation(msg));
        let v = &self.vectors;
        let levels = self.q_max + 1;
        if [
            v.q.len(),
            v.ns.len(),
            v.f.len(),
            v.qhat.len(),
            self.entropy.len(),
        ]
        .iter()
        .any(|&l| l != levels)
        {
            return fail(format!("vector lengths differ from q_max + 1 = {levels}"));
        }
        let mut suffix = 0;
        for q in (0..levels).rev() {
            suffix += v.f[q];
            if v.ns[q] != suffix {
                return fail(format!(
                    "Ns[{q}] = {} but suffix sum of f is {suffix}",
                    v.ns[q]
                ));
            }
            if v.q[q] > v.ns[q] {
                return fail(format!("Q[{q}] = {} exceeds Ns[{q}] = {}", v.q[q], v.ns[q]));
            }
            if !(0.0..=1.0).contains(&self.entropy[q]) {
                return fail(format!("S[{q}] = {} outside [0, 1]", self.entropy[q]));
            }
            let incidences: usize = self.nodes.by_level[q].iter().sum();
            if incidences != (q + 1) * v.f[q] {
                return fail(format!(
                    "level {q}: {incidences} incidences for f = {}",
                    v.f[q]
                ));
            }
        }
        if suffix != self.simplex_count {
            return fail(format!(
                "f sums to {suffix}, complex has {}",
                self.simplex_count
            ));
        }
        let top = self.q_max;
        if v.q[top] != v.f[top] {
            return fail(format!(
                "Q[q_max] = {} but f[q_max] = {}",
                v.q[top], v.f[top]
            ));
        }
        if v.qhat[top] != 0.0 {
            return fail(format!("Qhat[q_max] = {}", v.qhat[top]));
        }
        let handshake: usize = self.nodes.dim.iter().sum();
        let expected: usize = v.f.iter().enumerate().map(|(q, &c)| (q + 1) * c).sum();
        if handshake != expected {
            return fail(format!("sum of node dimensions {handshake} != {expected}"));
        }
        if let Some(components) = graph_components {
            if v.q[0] != components {
                return fail(format!(
                    "Q[0] = {} but graph has {components} components",
                    v.q[0]
                ));
            }
            if let Some(i) = self.nodes.dim.iter().position(|&d| d == 0) {
                return fail(format!("node {i} lies in no simplex"));
            }
        }
        Ok(())
    }
}
