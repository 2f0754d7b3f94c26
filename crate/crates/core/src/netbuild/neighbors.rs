//! Neighborhood rules: label-filtered kNN, strict ε-radius, and the hybrid
//! that prefers the ε-radius set when it holds more than `k` members.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Metric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonSource {
    MedianKnnDistances,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonValue {
    pub value: f64,
    pub source: EpsilonSource,
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `k` candidates closest under `dist`, ordered by (distance, index).
fn nearest(
    candidates: impl Iterator<Item = usize>,
    dist: impl Fn(usize) -> f64,
    k: usize,
) -> Vec<(f64, usize)> {
    let mut scored: Vec<(f64, usize)> = candidates.map(|j| (dist(j), j)).collect();
    if k == 0 {
        return Vec::new();
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_distance_then_index);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_distance_then_index);
    scored
}

fn peers(d: &Dataset, i: usize, same_label_only: bool) -> impl Iterator<Item = usize> + '_ {
    let y = d.label(i);
    (0..d.n_instances()).filter(move |&j| j != i && (!same_label_only || d.label(j) == y))
}

/// Up to `k` nearest other instances, ordered by (distance, index).
pub fn knn_neighbors(
    d: &Dataset,
    i: usize,
    k: usize,
    same_label_only: bool,
    metric: Metric,
) -> Vec<usize> {
    knn_with_distances(d, i, k, same_label_only, metric)
        .into_iter()
        .map(|(_, j)| j)
        .collect()
}

pub(crate) fn knn_with_distances(
    d: &Dataset,
    i: usize,
    k: usize,
    same_label_only: bool,
    metric: Metric,
) -> Vec<(f64, usize)> {
    nearest(peers(d, i, same_label_only), |j| metric.between(d, i, j), k)
}

/// Other instances strictly closer than `epsilon`, ascending by index.
pub fn epsilon_radius_neighbors(
    d: &Dataset,
    i: usize,
    epsilon: f64,
    same_label_only: bool,
    metric: Metric,
) -> Vec<usize> {
    peers(d, i, same_label_only)
        .filter(|&j| metric.between(d, i, j) < epsilon)
        .collect()
}

/// The ε-radius set if it has more than `k` members, else the kNN list.
pub fn hybrid_neighbors(
    d: &Dataset,
    i: usize,
    k: usize,
    epsilon: f64,
    metric: Metric,
) -> Vec<usize> {
    let radius = epsilon_radius_neighbors(d, i, epsilon, true, metric);
    if radius.len() > k {
        radius
    } else {
        knn_neighbors(d, i, k, true, metric)
    }
}

/// Median of the pooled kNN distances over every instance.
pub fn compute_epsilon(
    d: &Dataset,
    k: usize,
    same_label_only: bool,
    metric: Metric,
) -> Result<EpsilonValue> {
    let mut pool: Vec<f64> = (0..d.n_instances())
        .flat_map(|i| knn_with_distances(d, i, k, same_label_only, metric))
        .map(|(dist, _)| dist)
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyDistancePool);
    }
    pool.sort_unstable_by(f64::total_cmp);
    let mid = pool.len() / 2;
    let value = if pool.len() % 2 == 1 {
        pool[mid]
    } else {
        (pool[mid - 1] + pool[mid]) / 2.0
    };
    Ok(EpsilonValue {
        value,
        source: EpsilonSource::MedianKnnDistances,
    })
}

/// kNN of a free point among `pool` rows.
pub(crate) fn point_knn(
    d: &Dataset,
    x: &[f64],
    pool: &[usize],
    k: usize,
    metric: Metric,
) -> Vec<usize> {
    nearest(pool.iter().copied(), |j| metric.to_point(d, x, j), k)
        .into_iter()
        .map(|(_, j)| j)
        .collect()
}

pub(crate) fn point_hybrid(
    d: &Dataset,
    x: &[f64],
    pool: &[usize],
    k: usize,
    epsilon: f64,
    metric: Metric,
) -> Vec<usize> {
    let radius: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&j| metric.to_point(d, x, j) < epsilon)
        .collect();
    if radius.len() > k {
        radius
    } else {
        point_knn(d, x, pool, k, metric)
    }
}

pub(crate) fn point_radius(
    d: &Dataset,
    x: &[f64],
    pool: &[usize],
    epsilon: f64,
    metric: Metric,
) -> Vec<usize> {
    pool.iter()
        .copied()
        .filter(|&j| metric.to_point(d, x, j) < epsilon)
        .collect()
}
