mod common;

use common::*;
use netclass::measures::{betweenness_centrality, connected_components, local_clustering};
use netclass::netbuild::NetworkGraph;
use rand::Rng;

fn graph(n: usize, es: &EdgeSet) -> NetworkGraph {
    NetworkGraph::from_edges(n, es.iter().copied())
}

#[test]
fn betweenness_matches_path_counting() {
    let mut r = rng(11);
    for _ in 0..300 {
        let (n, es) = random_graph(&mut r, 64);
        let got = betweenness_centrality(&graph(n, &es), false).values;
        let want = betweenness(n, &es);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-9, "{g} vs {w} on n={n}");
        }
        let norm = betweenness_centrality(&graph(n, &es), true).values;
        if n >= 3 {
            let scale = ((n - 1) * (n - 2)) as f64 / 2.0;
            for (g, w) in norm.iter().zip(&want) {
                assert!((g - w / scale).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn tree_betweenness_sums_to_interior_path_length() {
    let mut r = rng(3);
    for _ in 0..50 {
        let n = r.gen_range(2..60);
        let es: EdgeSet = (1..n).map(|v| edge(r.gen_range(0..v), v)).collect();
        let g = graph(n, &es);
        // every pair has one path; its interior has d(s,t) - 1 nodes
        let mut dist_total = 0usize;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in g.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            dist_total += dist.iter().skip(s + 1).map(|d| d - 1).sum::<usize>();
        }
        let sum: f64 = betweenness_centrality(&g, false).values.iter().sum();
        assert!(
            (sum - dist_total as f64).abs() < 1e-6,
            "{sum} vs {dist_total}"
        );
    }
}

#[test]
fn clustering_and_components_match_brute_force() {
    let mut r = rng(5);
    for _ in 0..100 {
        let (n, es) = random_graph(&mut r, 40);
        let g = graph(n, &es);
        assert_eq!(connected_components(&g).count, component_count(n, &es));
        let cc = local_clustering(&g).values;
        for (v, got) in cc.iter().enumerate() {
            let ns: Vec<usize> = (0..n)
                .filter(|&u| es.contains(&edge(u, v)) && u != v)
                .collect();
            let deg = ns.len();
            let mut tri = 0;
            for a in 0..deg {
                for b in a + 1..deg {
                    tri += usize::from(es.contains(&edge(ns[a], ns[b])));
                }
            }
            let want = if deg < 2 {
                0.0
            } else {
                2.0 * tri as f64 / (deg * (deg - 1)) as f64
            };
            assert!((got - want).abs() < 1e-12);
        }
    }
}
