//! High-level classification by betweenness perturbation.
//!
//! The test instance is linked into the training network with the rule that
//! built it. By default the rule runs over all training nodes, since the
//! test label is unknown, and class `c` absorbs the `links_c` edges that
//! land on its nodes. [`Insertion::PerClass`] instead runs the rule inside
//! each class separately.
//!
//! The perturbation `p_c` is the mean absolute change of the class nodes'
//! normalized betweenness caused by the insertion, divided by
//! `max(B_before) + δ`. Raw class scores are `links_c · exp(-p_c) · prior(c)`
//! ([`Scoring::LinkWeighted`]) or `exp(-p_c) · prior(c)`
//! ([`Scoring::Perturbation`]); a class that absorbs no edge scores 0. The
//! posterior is the normalized raw score.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::measures::betweenness_centrality;
use crate::netbuild::{ConstructionConfig, Network, NetworkGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub construction: ConstructionConfig,
    pub use_priors: bool,
    /// δ in the perturbation denominator.
    pub stabilizer: f64,
    #[serde(default)]
    pub insertion: Insertion,
    #[serde(default)]
    pub scoring: Scoring,
}

/// How the test node is linked into each class subgraph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Insertion {
    /// Construction rule run over all training nodes (label unknown); each
    /// class keeps the links that landed in it.
    #[default]
    Unlabeled,
    /// Construction rule run over the class's own nodes only.
    PerClass,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scoring {
    /// `exp(-p_c) · prior(c)`
    Perturbation,
    /// `links_c · exp(-p_c) · prior(c)`
    #[default]
    LinkWeighted,
}

impl FromStr for Insertion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unlabeled" => Ok(Insertion::Unlabeled),
            "per-class" => Ok(Insertion::PerClass),
            other => Err(Error::InvalidConfig(format!("unknown insertion {other:?}"))),
        }
    }
}

impl FromStr for Scoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perturbation" => Ok(Scoring::Perturbation),
            "link-weighted" => Ok(Scoring::LinkWeighted),
            other => Err(Error::InvalidConfig(format!("unknown scoring {other:?}"))),
        }
    }
}

impl ClassifierConfig {
    pub fn new(construction: ConstructionConfig) -> Self {
        Self {
            construction,
            use_priors: true,
            stabilizer: 1e-12,
            insertion: Insertion::default(),
            scoring: Scoring::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.construction.validate()?;
        if !(self.stabilizer > 0.0 && self.stabilizer.is_finite()) {
            return Err(Error::InvalidConfig(
                "stabilizer must be a positive finite number".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformityResult {
    /// `None` when the class could not absorb the test node.
    pub perturbation: Vec<Option<f64>>,
    /// Edges the test node formed with each class.
    pub links: Vec<usize>,
    pub posterior: Vec<f64>,
    pub predicted: usize,
    /// Every class scored zero; `predicted` is the largest-prior class.
    pub fallback: bool,
}

/// Induced subgraph on the class-`class` nodes of a training graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSubgraph {
    pub class: usize,
    pub graph: NetworkGraph,
    /// Training-graph node (dataset row) of each local node, ascending.
    pub rows: Vec<usize>,
}

pub fn class_subgraph(g: &NetworkGraph, class: usize) -> Result<ClassSubgraph> {
    let rows: Vec<usize> = (0..g.node_count())
        .filter(|&v| g.label(v) == Some(class))
        .collect();
    if rows.is_empty() {
        return Err(Error::ClassAbsent(class));
    }
    Ok(ClassSubgraph {
        class,
        graph: g.induced(&rows),
        rows,
    })
}

fn normalized_betweenness(g: &NetworkGraph) -> Vec<f64> {
    betweenness_centrality(g, true).values
}

fn perturbation_with(
    sub: &ClassSubgraph,
    before: &[f64],
    linked_rows: &[usize],
    stabilizer: f64,
) -> Result<f64> {
    let mut aug = sub.graph.clone();
    let t = aug.add_node(None, None);
    for r in linked_rows {
        if let Ok(local) = sub.rows.binary_search(r) {
            aug.add_edge(t, local);
        }
    }
    if aug.degree(t) == 0 {
        return Err(Error::IsolatedInsertion(sub.class));
    }
    let after = normalized_betweenness(&aug);
    let max_before = before.iter().copied().fold(0.0, f64::max);
    let total: f64 = before.iter().zip(&after).map(|(b, a)| (a - b).abs()).sum();
    Ok(total / before.len() as f64 / (max_before + stabilizer))
}

/// Perturbation `p_c` caused by linking `x` into the class subgraph.
pub fn perturbation_score(
    sub: &ClassSubgraph,
    net: &Network,
    d: &Dataset,
    x: &[f64],
    cfg: &ClassifierConfig,
) -> Result<f64> {
    let rows = net.test_neighborhood(d, x, sub.class)?;
    perturbation_with(
        sub,
        &normalized_betweenness(&sub.graph),
        &rows,
        cfg.stabilizer,
    )
}

/// Turns raw class scores into a posterior and a prediction.
///
/// Ties on the score go to the larger prior, then the smaller class id. If
/// every score is zero the largest-prior class is predicted, the posterior
/// is the normalized prior, and the result is flagged.
pub fn decide(raw: &[f64], priors: &[f64]) -> (Vec<f64>, usize, bool) {
    let better = |a: usize, b: usize, key: &[f64]| {
        key[a] > key[b] || (key[a] == key[b] && priors[a] > priors[b])
    };
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        let posterior: Vec<f64> = raw.iter().map(|s| s / total).collect();
        let best = (1..raw.len()).fold(0, |best, c| if better(c, best, raw) { c } else { best });
        (posterior, best, false)
    } else {
        let ptotal: f64 = priors.iter().sum();
        let best =
            (1..priors.len()).fold(0, |best, c| if priors[c] > priors[best] { c } else { best });
        (priors.iter().map(|p| p / ptotal).collect(), best, true)
    }
}

struct ClassModel {
    sub: ClassSubgraph,
    before: Vec<f64>,
}

/// Classifier over a fixed training graph; class subgraphs and their
/// baseline betweenness are computed once.
pub struct HighLevelClassifier<'d> {
    dataset: &'d Dataset,
    network: Network,
    config: ClassifierConfig,
    classes: Vec<Option<ClassModel>>,
    priors: Vec<f64>,
}

impl<'d> HighLevelClassifier<'d> {
    pub fn fit(d: &'d Dataset, cfg: ClassifierConfig) -> Result<Self> {
        cfg.validate()?;
        let network = Network::build(d, &cfg.construction)?;
        Self::from_network(d, network, cfg)
    }

    pub fn from_network(d: &'d Dataset, network: Network, cfg: ClassifierConfig) -> Result<Self> {
        cfg.validate()?;
        if network.config != cfg.construction {
            return Err(Error::InvalidConfig(
                "network was built with a different construction config".into(),
            ));
        }
        let g = &network.graph;
        if g.node_count() == 0 {
            return Err(Error::EmptyTrainingGraph);
        }
        if g.node_count() != d.n_instances() {
            return Err(Error::GraphDatasetMismatch(format!(
                "graph has {} nodes, dataset {} rows",
                g.node_count(),
                d.n_instances()
            )));
        }
        let classes: Vec<Option<ClassModel>> = (0..d.n_classes())
            .map(|c| {
                class_subgraph(g, c).ok().map(|sub| ClassModel {
                    before: normalized_betweenness(&sub.graph),
                    sub,
                })
            })
            .collect();
        let sizes: Vec<f64> = classes
            .iter()
            .map(|m| m.as_ref().map_or(0.0, |m| m.sub.rows.len() as f64))
            .collect();
        let priors = if cfg.use_priors {
            let total: f64 = sizes.iter().sum();
            sizes.iter().map(|s| s / total).collect()
        } else {
            vec![1.0 / d.n_classes() as f64; d.n_classes()]
        };
        Ok(Self {
            dataset: d,
            network,
            config: cfg,
            classes,
            priors,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Per-class `(perturbation, link count)`; `None` for classes that could
    /// not absorb `x`.
    pub fn perturbations(&self, x: &[f64]) -> Result<Vec<Option<(f64, usize)>>> {
        let d = self.dataset;
        if x.len() != d.n_attributes() {
            return Err(Error::AttributeCountMismatch {
                expected: d.n_attributes(),
                found: x.len(),
            });
        }
        let shared = match self.config.insertion {
            Insertion::Unlabeled => Some(self.network.unlabeled_neighborhood(d, x)?),
            Insertion::PerClass => None,
        };
        self.classes
            .iter()
            .map(|model| {
                let Some(model) = model else { return Ok(None) };
                let rows = match &shared {
                    Some(rows) => rows
                        .iter()
                        .copied()
                        .filter(|r| model.sub.rows.binary_search(r).is_ok())
                        .collect(),
                    None => self.network.test_neighborhood(d, x, model.sub.class)?,
                };
                match perturbation_with(&model.sub, &model.before, &rows, self.config.stabilizer) {
                    Ok(p) => Ok(Some((p, rows.len()))),
                    Err(Error::IsolatedInsertion(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect()
    }

    /// Unnormalized class scores, before [`decide`].
    pub fn raw_scores(&self, scored: &[Option<(f64, usize)>]) -> Vec<f64> {
        scored
            .iter()
            .zip(&self.priors)
            .map(|(s, prior)| match (s, self.config.scoring) {
                (None, _) => 0.0,
                (Some((p, _)), Scoring::Perturbation) => (-p).exp() * prior,
                (Some((p, links)), Scoring::LinkWeighted) => *links as f64 * (-p).exp() * prior,
            })
            .collect()
    }

    pub fn classify(&self, x: &[f64]) -> Result<ConformityResult> {
        let scored = self.perturbations(x)?;
        let (posterior, predicted, fallback) = decide(&self.raw_scores(&scored), &self.priors);
        Ok(ConformityResult {
            perturbation: scored.iter().map(|s| s.map(|s| s.0)).collect(),
            links: scored.iter().map(|s| s.map_or(0, |s| s.1)).collect(),
            posterior,
            predicted,
            fallback,
        })
    }

    /// Classifies each row independently against the training graph.
    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Vec<Result<ConformityResult>> {
        xs.par_iter().map(|x| self.classify(x)).collect()
    }
}

/// One-shot classification against an existing training network.
pub fn classify(
    net: &Network,
    d: &Dataset,
    x: &[f64],
    cfg: &ClassifierConfig,
) -> Result<ConformityResult> {
    HighLevelClassifier::from_network(d, net.clone(), *cfg)?.classify(x)
}

pub fn predict_batch(
    net: &Network,
    d: &Dataset,
    xs: &[Vec<f64>],
    cfg: &ClassifierConfig,
) -> Result<Vec<Result<ConformityResult>>> {
    Ok(HighLevelClassifier::from_network(d, net.clone(), *cfg)?.predict_batch(xs))
}
