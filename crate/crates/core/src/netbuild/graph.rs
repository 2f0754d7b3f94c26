use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph over instance-indexed nodes.
///
/// Neighbor lists are kept sorted and duplicate-free. Nodes carry the class
/// of the instance they came from; inserted test nodes carry `None` for both
/// label and instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkGraph {
    adjacency: Vec<Vec<usize>>,
    node_label: Vec<Option<usize>>,
    node_instance: Vec<Option<usize>>,
}

impl NetworkGraph {
    /// Edgeless graph, one node per `(label, instance)` pair.
    pub fn with_nodes(node_label: Vec<Option<usize>>, node_instance: Vec<Option<usize>>) -> Self {
        assert_eq!(node_label.len(), node_instance.len());
        Self {
            adjacency: vec![Vec::new(); node_label.len()],
            node_label,
            node_instance,
        }
    }

    /// Edgeless graph of `n` unlabeled nodes, handy for measures on bare topologies.
    pub fn unlabeled(n: usize) -> Self {
        Self::with_nodes(vec![None; n], vec![None; n])
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::unlabeled(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        self.node_label[v]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.node_label
    }

    pub fn instance(&self, v: usize) -> Option<usize> {
        self.node_instance[v]
    }

    pub fn instances(&self) -> &[Option<usize>] {
        &self.node_instance
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Adds `{u, v}`. Self-loops and existing edges are ignored; returns
    /// whether the edge was new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(
            u < self.node_count() && v < self.node_count(),
            "node out of range"
        );
        if u == v {
            return false;
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[u].insert(pos, v);
                let pos = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pos, u);
                true
            }
        }
    }

    /// Appends a node and returns its id.
    pub fn add_node(&mut self, label: Option<usize>, instance: Option<usize>) -> usize {
        self.adjacency.push(Vec::new());
        self.node_label.push(label);
        self.node_instance.push(instance);
        self.adjacency.len() - 1
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn same_nodes(&self, other: &NetworkGraph) -> bool {
        self.node_label == other.node_label && self.node_instance == other.node_instance
    }

    /// Induced subgraph on `nodes` (in the given order); returns the graph
    /// with nodes renumbered `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> NetworkGraph {
        let mut local = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            local[old] = new;
        }
        let mut g = NetworkGraph::with_nodes(
            nodes.iter().map(|&v| self.node_label[v]).collect(),
            nodes.iter().map(|&v| self.node_instance[v]).collect(),
        );
        for (new, &old) in nodes.iter().enumerate() {
            g.adjacency[new] = self.adjacency[old]
                .iter()
                .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                .collect();
            g.adjacency[new].sort_unstable();
        }
        g
    }

    /// Checks symmetry, simplicity, sortedness and id range.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.node_label.len() != n || self.node_instance.len() != n {
            return Err(Error::InvalidConfig("node metadata length mismatch".into()));
        }
        for (u, ns) in self.adjacency.iter().enumerate() {
            if ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "node {u}: unsorted or duplicate neighbors"
                )));
            }
            for &v in ns {
                if v >= n || v == u || self.adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::InvalidConfig(format!("bad edge {{{u}, {v}}}")));
                }
            }
        }
        Ok(())
    }

    /// Union of `other`'s edges into `self`. Node sets must match.
    pub fn union_with(&mut self, other: &NetworkGraph) -> Result<()> {
        if !self.same_nodes(other) {
            return Err(Error::MismatchedNodeSets);
        }
        for (u, v) in other.edges() {
            self.add_edge(u, v);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_edge_keeps_graph_simple() {
        let mut g = NetworkGraph::unlabeled(3);
        assert!(g.add_edge(2, 0));
        assert!(!g.add_edge(0, 2));
        assert!(!g.add_edge(1, 1));
        g.add_edge(1, 0);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        g.validate().unwrap();
    }

    #[test]
    fn induced_renumbers() {
        let g = NetworkGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]);
        let s = g.induced(&[3, 2, 0]);
        assert_eq!(s.node_count(), 3);
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        s.validate().unwrap();
    }

    #[test]
    fn union_requires_same_nodes() {
        let mut a = NetworkGraph::from_edges(3, [(0, 1)]);
        let b = NetworkGraph::from_edges(3, [(1, 2)]);
        a.union_with(&b).unwrap();
        assert_eq!(a.edge_count(), 2);
        assert!(a.union_with(&NetworkGraph::unlabeled(4)).is_err());
    }
}
