//! Node and graph measures: betweenness, local clustering, degree
//! assortativity and connected components.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netbuild::NetworkGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    BetweennessRaw,
    BetweennessNormalized,
    LocalClustering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub values: Vec<f64>,
    pub kind: MeasureKind,
}

/// Shortest-path betweenness on an unweighted undirected graph (Brandes).
///
/// Each unordered pair is counted once. Normalization divides by
/// `(n-1)(n-2)/2`; graphs with fewer than 3 nodes score all zeros.
pub fn betweenness_centrality(g: &NetworkGraph, normalized: bool) -> MeasureVector {
    let n = g.node_count();
    let mut scratch = BrandesScratch::new(n);
    let mut bc = vec![0.0; n];
    for s in 0..n {
        scratch.accumulate(g, s, &mut bc);
    }
    for b in &mut bc {
        *b /= 2.0;
    }
    let kind = if normalized {
        if n >= 3 {
            let scale = ((n - 1) * (n - 2)) as f64 / 2.0;
            for b in &mut bc {
                *b /= scale;
            }
        } else {
            bc.iter_mut().for_each(|b| *b = 0.0);
        }
        MeasureKind::BetweennessNormalized
    } else {
        MeasureKind::BetweennessRaw
    };
    MeasureVector { values: bc, kind }
}

struct BrandesScratch {
    order: Vec<usize>,
    queue: VecDeque<usize>,
    dist: Vec<usize>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        Self {
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
            dist: vec![usize::MAX; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
        }
    }

    /// Adds the single-source dependencies of `s` into `bc`.
    fn accumulate(&mut self, g: &NetworkGraph, s: usize, bc: &mut [f64]) {
        self.order.clear();
        self.dist.fill(usize::MAX);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] == usize::MAX {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
        // predecessors of w are the neighbors one level closer to s
        for &w in self.order.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in g.neighbors(w) {
                if self.dist[v] != usize::MAX && self.dist[v] + 1 == self.dist[w] {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            if w != s {
                bc[w] += self.delta[w];
            }
        }
    }
}

/// `2·triangles / (deg·(deg-1))` per node, 0 below degree 2.
pub fn local_clustering(g: &NetworkGraph) -> MeasureVector {
    let values = (0..g.node_count())
        .map(|v| {
            let ns = g.neighbors(v);
            let deg = ns.len();
            if deg < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (a, &u) in ns.iter().enumerate() {
                for &w in &ns[a + 1..] {
                    if g.has_edge(u, w) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (deg * (deg - 1)) as f64
        })
        .collect();
    MeasureVector {
        values,
        kind: MeasureKind::LocalClustering,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AssortativityError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("endpoint degrees have zero variance")]
    ZeroVariance,
}

/// Pearson correlation of endpoint degrees, each edge taken in both
/// orientations.
pub fn degree_assortativity(g: &NetworkGraph) -> Result<f64, AssortativityError> {
    let mut m = 0.0;
    let (mut sum, mut sum_sq, mut sum_prod) = (0.0, 0.0, 0.0);
    for (u, v) in g.edges() {
        let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
        m += 2.0;
        sum += du + dv;
        sum_sq += du * du + dv * dv;
        sum_prod += 2.0 * du * dv;
    }
    if m == 0.0 {
        return Err(AssortativityError::NoEdges);
    }
    let mean = sum / m;
    let var = sum_sq / m - mean * mean;
    if var <= 1e-12 * mean.max(1.0).powi(2) {
        return Err(AssortativityError::ZeroVariance);
    }
    Ok(((sum_prod / m - mean * mean) / var).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub count: usize,
    /// Dense ids in `[0, count)`, numbered by lowest member node.
    pub ids: Vec<usize>,
}

pub fn connected_components(g: &NetworkGraph) -> Components {
    let n = g.node_count();
    let mut ids = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if ids[start] != usize::MAX {
            continue;
        }
        ids[start] = count;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if ids[w] == usize::MAX {
                    ids[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    Components { count, ids }
}
