//! Network construction from a [`Dataset`].
//!
//! Three rules are supported:
//!
//! * `knn-only`: every instance links to its `k` nearest same-class instances.
//! * `knn-epsilon-radius`: the same-class ε-radius set when it holds more than
//!   `k` members, the kNN list otherwise.
//! * `attribute-meta`: one 1-D kNN graph per attribute, merged on instance
//!   index, then unioned with the instance-level hybrid graph.
//!
//! Every rule only links instances of the same class, so training graphs are
//! label-pure. Node `i` of a training graph is row `i` of the dataset it was
//! built from.

mod graph;
mod neighbors;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use graph::NetworkGraph;
pub use neighbors::{
    compute_epsilon, epsilon_radius_neighbors, hybrid_neighbors, knn_neighbors, EpsilonSource,
    EpsilonValue,
};

use crate::dataset::{Dataset, Metric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    KnnOnly,
    KnnEpsilonRadius,
    AttributeMeta,
}

impl Method {
    /// Short name used on the command line and in reports.
    pub fn key(self) -> &'static str {
        match self {
            Method::KnnOnly => "knn",
            Method::KnnEpsilonRadius => "knn-eps",
            Method::AttributeMeta => "meta",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::KnnOnly => "kNN",
            Method::KnnEpsilonRadius => "kNN+ε-radius",
            Method::AttributeMeta => "attribute meta",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "knn" | "knn-only" => Ok(Method::KnnOnly),
            "knn-eps" | "knn-epsilon-radius" | "baseline" => Ok(Method::KnnEpsilonRadius),
            "meta" | "attribute-meta" => Ok(Method::AttributeMeta),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonPolicy {
    MedianKnnDistances,
    Fixed(f64),
}

/// Which instance-level edges `attribute-meta` adds on top of the merged
/// attribute graphs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceStage {
    /// kNN / ε-radius hybrid.
    #[default]
    Hybrid,
    Knn,
    Radius,
    None,
}

impl FromStr for InstanceStage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hybrid" => Ok(InstanceStage::Hybrid),
            "knn" => Ok(InstanceStage::Knn),
            "radius" | "eps" => Ok(InstanceStage::Radius),
            "none" => Ok(InstanceStage::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown instance stage {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub k: usize,
    pub epsilon: EpsilonPolicy,
    pub method: Method,
    #[serde(default)]
    pub instance_stage: InstanceStage,
}

impl ConstructionConfig {
    pub fn new(method: Method, k: usize) -> Self {
        Self {
            k,
            epsilon: EpsilonPolicy::MedianKnnDistances,
            method,
            instance_stage: InstanceStage::Hybrid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if let EpsilonPolicy::Fixed(e) = self.epsilon {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "fixed epsilon {e} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    fn needs_epsilon(&self) -> bool {
        match self.method {
            Method::KnnOnly => false,
            Method::KnnEpsilonRadius => true,
            Method::AttributeMeta => matches!(
                self.instance_stage,
                InstanceStage::Hybrid | InstanceStage::Radius
            ),
        }
    }
}

/// ε under the configured policy, from the instance-level label-filtered kNN
/// distance pool.
pub fn resolve_epsilon(d: &Dataset, c: &ConstructionConfig) -> Result<EpsilonValue> {
    match c.epsilon {
        EpsilonPolicy::Fixed(value) => Ok(EpsilonValue {
            value,
            source: EpsilonSource::Fixed,
        }),
        EpsilonPolicy::MedianKnnDistances => compute_epsilon(d, c.k, true, Metric::Euclidean),
    }
}

fn empty_graph(d: &Dataset) -> NetworkGraph {
    NetworkGraph::with_nodes(
        d.labels().iter().map(|&l| Some(l)).collect(),
        (0..d.n_instances()).map(|i| Some(d.origin(i))).collect(),
    )
}

fn graph_from_neighborhoods(
    d: &Dataset,
    neighborhood: impl Fn(usize) -> Vec<usize> + Sync + Send,
) -> NetworkGraph {
    let lists: Vec<Vec<usize>> = (0..d.n_instances())
        .into_par_iter()
        .map(&neighborhood)
        .collect();
    let mut g = empty_graph(d);
    for (i, ns) in lists.into_iter().enumerate() {
        for j in ns {
            g.add_edge(i, j);
        }
    }
    g
}

fn instance_graph_with(
    d: &Dataset,
    k: usize,
    stage: InstanceStage,
    epsilon: Option<f64>,
) -> NetworkGraph {
    let eps = epsilon.unwrap_or(0.0);
    match stage {
        InstanceStage::Hybrid => {
            graph_from_neighborhoods(d, |i| hybrid_neighbors(d, i, k, eps, Metric::Euclidean))
        }
        InstanceStage::Knn => {
            graph_from_neighborhoods(d, |i| knn_neighbors(d, i, k, true, Metric::Euclidean))
        }
        InstanceStage::Radius => graph_from_neighborhoods(d, |i| {
            epsilon_radius_neighbors(d, i, eps, true, Metric::Euclidean)
        }),
        InstanceStage::None => empty_graph(d),
    }
}

/// Instance-space graph under `knn-only` or `knn-epsilon-radius`.
pub fn build_instance_graph(d: &Dataset, c: &ConstructionConfig) -> Result<NetworkGraph> {
    c.validate()?;
    match c.method {
        Method::KnnOnly => Ok(instance_graph_with(d, c.k, InstanceStage::Knn, None)),
        Method::KnnEpsilonRadius => {
            let eps = resolve_epsilon(d, c)?;
            Ok(instance_graph_with(
                d,
                c.k,
                InstanceStage::Hybrid,
                Some(eps.value),
            ))
        }
        Method::AttributeMeta => Err(Error::InvalidConfig(
            "instance graph needs method knn-only or knn-epsilon-radius".into(),
        )),
    }
}

/// Label-filtered 1-D kNN graph over attribute column `a`.
pub fn build_attribute_graph(
    d: &Dataset,
    a: usize,
    c: &ConstructionConfig,
) -> Result<NetworkGraph> {
    c.validate()?;
    if a >= d.n_attributes() {
        return Err(Error::InvalidConfig(format!("attribute {a} out of range")));
    }
    Ok(graph_from_neighborhoods(d, |i| {
        knn_neighbors(d, i, c.k, true, Metric::Attribute(a))
    }))
}

/// Edge union of graphs over the same node set.
pub fn merge_attribute_graphs(graphs: &[NetworkGraph]) -> Result<NetworkGraph> {
    let (first, rest) = graphs
        .split_first()
        .ok_or_else(|| Error::InvalidConfig("nothing to merge".into()))?;
    let mut merged = first.clone();
    for g in rest {
        merged.union_with(g)?;
    }
    Ok(merged)
}

pub fn build_meta_graph(d: &Dataset, c: &ConstructionConfig) -> Result<NetworkGraph> {
    if c.method != Method::AttributeMeta {
        return Err(Error::InvalidConfig(
            "meta graph needs method attribute-meta".into(),
        ));
    }
    let eps = if c.needs_epsilon() {
        Some(resolve_epsilon(d, c)?.value)
    } else {
        None
    };
    meta_graph_with(d, c, eps)
}

fn meta_graph_with(
    d: &Dataset,
    c: &ConstructionConfig,
    epsilon: Option<f64>,
) -> Result<NetworkGraph> {
    let per_attribute: Vec<NetworkGraph> = (0..d.n_attributes())
        .into_par_iter()
        .map(|a| build_attribute_graph(d, a, c))
        .collect::<Result<_>>()?;
    let mut merged = merge_attribute_graphs(&per_attribute)?;
    merged.union_with(&instance_graph_with(d, c.k, c.instance_stage, epsilon))?;
    Ok(merged)
}

/// A training graph together with the ε it was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub graph: NetworkGraph,
    pub config: ConstructionConfig,
    pub epsilon: Option<EpsilonValue>,
}

impl Network {
    pub fn build(d: &Dataset, c: &ConstructionConfig) -> Result<Self> {
        c.validate()?;
        let epsilon = if c.needs_epsilon() {
            Some(resolve_epsilon(d, c)?)
        } else {
            None
        };
        let eps = epsilon.map(|e| e.value);
        let graph = match c.method {
            Method::KnnOnly => instance_graph_with(d, c.k, InstanceStage::Knn, None),
            Method::KnnEpsilonRadius => instance_graph_with(d, c.k, InstanceStage::Hybrid, eps),
            Method::AttributeMeta => meta_graph_with(d, c, eps)?,
        };
        Ok(Self {
            graph,
            config: *c,
            epsilon,
        })
    }

    /// Training rows of class `class`, i.e. the nodes a test instance
    /// assumed to be of that class may link to.
    pub fn class_pool(&self, class: usize) -> Vec<usize> {
        (0..self.graph.node_count())
            .filter(|&v| self.graph.label(v) == Some(class) && self.graph.instance(v).is_some())
            .collect()
    }

    /// Rows a test point `x` links to when assumed to be of class `class`.
    ///
    /// Uses the training-time ε; test data never changes it.
    pub fn test_neighborhood(&self, d: &Dataset, x: &[f64], class: usize) -> Result<Vec<usize>> {
        self.check_point(d, x)?;
        let pool = self.class_pool(class);
        if pool.is_empty() {
            return Err(Error::ClassAbsent(class));
        }
        Ok(self.neighborhood_within(d, x, &pool))
    }

    /// Rows a test point `x` of unknown class links to: the same rule, run
    /// over every training node without a label filter.
    pub fn unlabeled_neighborhood(&self, d: &Dataset, x: &[f64]) -> Result<Vec<usize>> {
        self.check_point(d, x)?;
        let pool: Vec<usize> = (0..self.graph.node_count())
            .filter(|&v| self.graph.instance(v).is_some())
            .collect();
        Ok(self.neighborhood_within(d, x, &pool))
    }

    fn check_point(&self, d: &Dataset, x: &[f64]) -> Result<()> {
        if x.len() != d.n_attributes() {
            return Err(Error::AttributeCountMismatch {
                expected: d.n_attributes(),
                found: x.len(),
            });
        }
        if self.graph.node_count() < d.n_instances() {
            return Err(Error::GraphDatasetMismatch(format!(
                "graph has {} nodes, dataset {} rows",
                self.graph.node_count(),
                d.n_instances()
            )));
        }
        Ok(())
    }

    fn neighborhood_within(&self, d: &Dataset, x: &[f64], pool: &[usize]) -> Vec<usize> {
        let k = self.config.k;
        let eps = self.epsilon.map(|e| e.value).unwrap_or(0.0);
        let mut rows = match self.config.method {
            Method::KnnOnly => neighbors::point_knn(d, x, pool, k, Metric::Euclidean),
            Method::KnnEpsilonRadius => {
                neighbors::point_hybrid(d, x, pool, k, eps, Metric::Euclidean)
            }
            Method::AttributeMeta => {
                let mut rows: Vec<usize> = (0..d.n_attributes())
                    .flat_map(|a| neighbors::point_knn(d, x, pool, k, Metric::Attribute(a)))
                    .collect();
                rows.extend(match self.config.instance_stage {
                    InstanceStage::Hybrid => {
                        neighbors::point_hybrid(d, x, pool, k, eps, Metric::Euclidean)
                    }
                    InstanceStage::Knn => neighbors::point_knn(d, x, pool, k, Metric::Euclidean),
                    InstanceStage::Radius => {
                        neighbors::point_radius(d, x, pool, eps, Metric::Euclidean)
                    }
                    InstanceStage::None => Vec::new(),
                });
                rows
            }
        };
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// Copy of the training graph with one unlabeled node for `x`.
    pub fn insert_test_node(
        &self,
        d: &Dataset,
        x: &[f64],
        assumed_class: usize,
    ) -> Result<NetworkGraph> {
        let rows = self.test_neighborhood(d, x, assumed_class)?;
        let mut g = self.graph.clone();
        let t = g.add_node(None, None);
        for r in rows {
            g.add_edge(t, r);
        }
        Ok(g)
    }
}

/// Free-function form of [`Network::insert_test_node`].
pub fn insert_test_node(
    net: &Network,
    d: &Dataset,
    x: &[f64],
    assumed_class: usize,
) -> Result<NetworkGraph> {
    net.insert_test_node(d, x, assumed_class)
}
