//! Brute-force reference implementations shared by the integration tests.
//! They read raw values only and share no code with the library's search
//! or path-counting routines.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use netclass::dataset::Dataset;
use netclass::netbuild::NetworkGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type EdgeSet = BTreeSet<(usize, usize)>;

pub fn edge(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

pub fn edge_set(g: &NetworkGraph) -> EdgeSet {
    g.edges().collect()
}

pub fn euclid(d: &Dataset, i: usize, j: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..d.n_attributes() {
        let t = d.value(i, a) - d.value(j, a);
        s += t * t;
    }
    s.sqrt()
}

/// `k` nearest same-label peers by repeated minimum extraction over
/// (distance, index).
pub fn knn(
    d: &Dataset,
    i: usize,
    k: usize,
    dist: &dyn Fn(usize, usize) -> f64,
) -> Vec<(f64, usize)> {
    let mut taken = vec![false; d.n_instances()];
    taken[i] = true;
    let mut out = Vec::new();
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (j, &used) in taken.iter().enumerate() {
            if used || d.label(j) != d.label(i) {
                continue;
            }
            let c = (dist(i, j), j);
            if best.is_none_or(|b| c.0 < b.0 || (c.0 == b.0 && c.1 < b.1)) {
                best = Some(c);
            }
        }
        match best {
            Some(b) => {
                taken[b.1] = true;
                out.push(b);
            }
            None => break,
        }
    }
    out
}

pub fn knn_edges(d: &Dataset, k: usize, dist: &dyn Fn(usize, usize) -> f64) -> EdgeSet {
    let mut es = EdgeSet::new();
    for i in 0..d.n_instances() {
        for (_, j) in knn(d, i, k, dist) {
            es.insert(edge(i, j));
        }
    }
    es
}

/// Median of all pooled kNN distances; `None` when the pool is empty.
pub fn epsilon(d: &Dataset, k: usize) -> Option<f64> {
    let mut pool: Vec<f64> = (0..d.n_instances())
        .flat_map(|i| knn(d, i, k, &|a, b| euclid(d, a, b)))
        .map(|(x, _)| x)
        .collect();
    if pool.is_empty() {
        return None;
    }
    pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = pool.len();
    Some(if n % 2 == 1 {
        pool[n / 2]
    } else {
        (pool[n / 2 - 1] + pool[n / 2]) / 2.0
    })
}

/// Radius set when it holds more than `k` peers, kNN otherwise.
pub fn hybrid_edges(d: &Dataset, k: usize) -> Option<EdgeSet> {
    let eps = epsilon(d, k)?;
    let mut es = EdgeSet::new();
    for i in 0..d.n_instances() {
        let radius: Vec<usize> = (0..d.n_instances())
            .filter(|&j| j != i && d.label(j) == d.label(i) && euclid(d, i, j) < eps)
            .collect();
        if radius.len() > k {
            radius.iter().for_each(|&j| {
                es.insert(edge(i, j));
            });
        } else {
            for (_, j) in knn(d, i, k, &|a, b| euclid(d, a, b)) {
                es.insert(edge(i, j));
            }
        }
    }
    Some(es)
}

pub fn attribute_edges(d: &Dataset, a: usize, k: usize) -> EdgeSet {
    knn_edges(d, k, &|i, j| (d.value(i, a) - d.value(j, a)).abs())
}

pub fn meta_edges(d: &Dataset, k: usize) -> Option<EdgeSet> {
    let mut es = hybrid_edges(d, k)?;
    for a in 0..d.n_attributes() {
        es.extend(attribute_edges(d, a, k));
    }
    Some(es)
}

pub fn component_count(n: usize, es: &EdgeSet) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut count = n;
    for &(u, v) in es {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            count -= 1;
        }
    }
    count
}

fn bfs(adj: &[Vec<usize>], s: usize) -> (Vec<Option<usize>>, Vec<f64>) {
    let n = adj.len();
    let mut dist = vec![None; n];
    let mut sigma = vec![0.0; n];
    dist[s] = Some(0);
    sigma[s] = 1.0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        let dv = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                q.push_back(w);
            }
            if dist[w] == Some(dv + 1) {
                sigma[w] += sigma[v];
            }
        }
    }
    (dist, sigma)
}

/// Raw betweenness from all-pairs path counts: the sum over unordered pairs
/// `s < t` of `σ_sv·σ_vt/σ_st` for every `v` on a shortest `s–t` path.
pub fn betweenness(n: usize, edges: &EdgeSet) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let all: Vec<_> = (0..n).map(|s| bfs(&adj, s)).collect();
    let mut b = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let Some(dst) = all[s].0[t] else { continue };
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if let (Some(dsv), Some(dvt)) = (all[s].0[v], all[v].0[t]) {
                    if dsv + dvt == dst {
                        b[v] += all[s].1[v] * all[v].1[t] / all[s].1[t];
                    }
                }
            }
        }
    }
    b
}

/// Dataset with values on a coarse grid, so distance ties are common and
/// every distance is computed exactly.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_attrs: usize,
    max_classes: usize,
) -> Dataset {
    let n_classes = rng.gen_range(1..=max_classes);
    let n = rng.gen_range(n_classes.max(2)..=max_n);
    let m = rng.gen_range(1..=max_attrs);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| f64::from(rng.gen_range(-8i32..=8)) * 0.5)
                .collect()
        })
        .collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_classes)).collect();
    for (c, l) in labels.iter_mut().take(n_classes).enumerate() {
        *l = c;
    }
    Dataset::new(
        rows,
        labels,
        (0..m).map(|a| format!("a{a}")).collect(),
        (0..n_classes).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> (usize, EdgeSet) {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.02..0.3);
    let mut es = EdgeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                es.insert((u, v));
            }
        }
    }
    (n, es)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(file: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(file)
}
