//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use tsnet_core::VisibilityGraph;

/// Every pair checked against every intermediate with the line inequality
/// `y_r < y_b + (y_a - y_b) (b - r) / (b - a)`.
pub fn brute_force_visibility(y: &[f64]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..y.len() {
        for b in a + 1..y.len() {
            let clear = (a + 1..b).all(|r| {
                let line = y[b] + (y[a] - y[b]) * (b - r) as f64 / (b - a) as f64;
                y[r] < line
            });
            if clear {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Components of the q-nearness graph over simplices of dimension `>= q`,
/// found by pairwise intersection and breadth-first search.
pub fn naive_q_components(simplices: &[Vec<usize>], q: usize) -> usize {
    let pool: Vec<&Vec<usize>> = simplices.iter().filter(|s| s.len() > q).collect();
    let shared = |a: &Vec<usize>, b: &Vec<usize>| a.iter().filter(|v| b.contains(v)).count();
    let mut seen = vec![false; pool.len()];
    let mut components = 0;
    for root in 0..pool.len() {
        if seen[root] {
            continue;
        }
        components += 1;
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for b in 0..pool.len() {
                if !seen[b] && shared(pool[a], pool[b]) > q {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    components
}

/// Erdős–Rényi graph with edge probability `density`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> VisibilityGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    VisibilityGraph::from_edges(n, edges).unwrap()
}

pub fn edge_set(g: &VisibilityGraph) -> Vec<(usize, usize)> {
    g.edges().collect()
}
