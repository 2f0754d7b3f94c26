use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationPolicy {
    #[default]
    None,
    MinMax,
    ZScore,
}

impl FromStr for NormalizationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "none" => Ok(NormalizationPolicy::None),
            "min-max" | "minmax" => Ok(NormalizationPolicy::MinMax),
            "z-score" | "zscore" => Ok(NormalizationPolicy::ZScore),
            other => Err(Error::InvalidConfig(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

/// Per-column affine transform fitted on one dataset and applicable to
/// others (test rows are mapped with the training split's statistics).
///
/// A column with zero spread maps every value to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    policy: NormalizationPolicy,
    offset: Vec<f64>,
    /// `None` marks a constant column.
    scale: Vec<Option<f64>>,
}

impl Normalizer {
    pub fn fit(d: &Dataset, policy: NormalizationPolicy) -> Self {
        let n = d.n_instances() as f64;
        let mut offset = Vec::with_capacity(d.n_attributes());
        let mut scale = Vec::with_capacity(d.n_attributes());
        for a in 0..d.n_attributes() {
            let (o, s) = match policy {
                NormalizationPolicy::None => (0.0, Some(1.0)),
                NormalizationPolicy::MinMax => {
                    let (lo, hi) = d
                        .column(a)
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v), hi.max(v))
                        });
                    (lo, (hi > lo).then_some(hi - lo))
                }
                NormalizationPolicy::ZScore => {
                    let mean = d.column(a).sum::<f64>() / n;
                    let ss: f64 = d.column(a).map(|v| (v - mean) * (v - mean)).sum();
                    let sd = if d.n_instances() > 1 {
                        (ss / (n - 1.0)).sqrt()
                    } else {
                        0.0
                    };
                    (mean, (sd > 0.0).then_some(sd))
                }
            };
            offset.push(o);
            scale.push(s);
        }
        Self {
            policy,
            offset,
            scale,
        }
    }

    pub fn policy(&self) -> NormalizationPolicy {
        self.policy
    }

    pub fn apply_row(&self, x: &[f64]) -> Vec<f64> {
        if self.policy == NormalizationPolicy::None {
            return x.to_vec();
        }
        x.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(&v, (&o, s))| match s {
                Some(s) => (v - o) / s,
                None => 0.0,
            })
            .collect()
    }

    pub fn apply(&self, d: &Dataset) -> Dataset {
        if self.policy == NormalizationPolicy::None {
            return d.clone();
        }
        let mut out = d.clone();
        let cols = d.n_attributes();
        for (i, row) in d.rows().enumerate() {
            out.values[i * cols..(i + 1) * cols].copy_from_slice(&self.apply_row(row));
        }
        out
    }
}

pub fn normalize(d: &Dataset, policy: NormalizationPolicy) -> Dataset {
    Normalizer::fit(d, policy).apply(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::toy;
    use proptest::prelude::*;

    fn column(d: &Dataset, a: usize) -> Vec<f64> {
        d.column(a).collect()
    }

    #[test]
    fn min_max_endpoints() {
        let d = toy(&[&[0.0], &[5.0], &[10.0]], &[0, 1, 0]);
        assert_eq!(
            column(&normalize(&d, NormalizationPolicy::MinMax), 0),
            [0.0, 0.5, 1.0]
        );
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let d = toy(&[&[3.0], &[3.0], &[3.0]], &[0, 1, 0]);
        assert_eq!(
            column(&normalize(&d, NormalizationPolicy::ZScore), 0),
            [0.0; 3]
        );
        assert_eq!(
            column(&normalize(&d, NormalizationPolicy::MinMax), 0),
            [0.0; 3]
        );
    }

    #[test]
    fn z_score_uses_sample_std() {
        // mean 2, sample variance ((1 + 0 + 1) / 2) = 1
        let d = toy(&[&[1.0], &[2.0], &[3.0]], &[0, 1, 0]);
        assert_eq!(
            column(&normalize(&d, NormalizationPolicy::ZScore), 0),
            [-1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn none_is_identity() {
        let d = toy(&[&[1.5, -2.0], &[7.0, 0.25]], &[0, 1]);
        let n = normalize(&d, NormalizationPolicy::None);
        assert_eq!(n, d);
    }

    #[test]
    fn labels_unchanged() {
        let d = toy(&[&[1.0], &[9.0], &[4.0]], &[1, 0, 1]);
        assert_eq!(
            normalize(&d, NormalizationPolicy::ZScore).labels(),
            d.labels()
        );
    }

    proptest! {
        #[test]
        fn min_max_is_idempotent(
            rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..30)
        ) {
            let labels: Vec<usize> = (0..rows.len()).map(|i| i % 2).collect();
            let d = Dataset::new(rows, labels, vec!["a".into(), "b".into(), "c".into()],
                vec!["x".into(), "y".into()]).unwrap();
            let once = normalize(&d, NormalizationPolicy::MinMax);
            let twice = normalize(&once, NormalizationPolicy::MinMax);
            for (u, v) in once.rows().zip(twice.rows()) {
                for (a, b) in u.iter().zip(v) {
                    prop_assert!((a - b).abs() < 1e-12);
                    prop_assert!((0.0..=1.0).contains(a));
                }
            }
        }
    }
}
