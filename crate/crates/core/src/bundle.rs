//! Versioned on-disk form of a trained network.
//!
//! A bundle records where its training data came from and a content hash
//! of that data. Reopening it against different data fails.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{load_csv, Dataset, LoadOptions, NormalizationPolicy, Normalizer};
use crate::error::{Error, Result};
use crate::netbuild::{ConstructionConfig, EpsilonValue, Network, NetworkGraph};

pub const FORMAT: &str = "netclass-graph-bundle";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphBundle {
    pub format: String,
    pub version: u32,
    pub data: PathBuf,
    pub load: LoadOptions,
    pub normalization: NormalizationPolicy,
    /// Fingerprint of the dataset as loaded, before normalization.
    pub dataset_fingerprint: String,
    pub config: ConstructionConfig,
    pub epsilon: Option<EpsilonValue>,
    pub graph: NetworkGraph,
}

/// A bundle reopened against its data: the prepared training set, the
/// fitted normalizer and the network.
pub struct Trained {
    pub dataset: Dataset,
    pub normalizer: Normalizer,
    pub network: Network,
}

impl GraphBundle {
    pub fn new(
        data: impl Into<PathBuf>,
        load: LoadOptions,
        normalization: NormalizationPolicy,
        raw: &Dataset,
        network: &Network,
    ) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            data: data.into(),
            load,
            normalization,
            dataset_fingerprint: raw.fingerprint(),
            config: network.config,
            epsilon: network.epsilon,
            graph: network.graph.clone(),
        }
    }

    /// Loads `data`, normalizes it and builds the network; returns the bundle
    /// together with the trained state.
    pub fn train(
        data: &Path,
        load: LoadOptions,
        normalization: NormalizationPolicy,
        config: &ConstructionConfig,
    ) -> Result<(Self, Trained)> {
        let raw = load_csv(data, &load)?;
        let normalizer = Normalizer::fit(&raw, normalization);
        let dataset = normalizer.apply(&raw);
        let network = Network::build(&dataset, config)?;
        let bundle = Self::new(data, load, normalization, &raw, &network);
        Ok((
            bundle,
            Trained {
                dataset,
                normalizer,
                network,
            },
        ))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("format").and_then(|f| f.as_str()) != Some(FORMAT) {
            return Err(Error::Bundle(format!("not a {FORMAT} file")));
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(VERSION) => {}
            other => {
                return Err(Error::Bundle(format!(
                    "unsupported bundle version {other:?}, expected {VERSION}"
                )))
            }
        }
        let bundle: Self = serde_json::from_value(value)?;
        bundle.graph.validate()?;
        Ok(bundle)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Reloads the training data (from `data_override` when given) and
    /// checks it against the recorded fingerprint.
    pub fn open(&self, data_override: Option<&Path>) -> Result<Trained> {
        let path = data_override.unwrap_or(&self.data);
        let raw = load_csv(path, &self.load)?;
        let found = raw.fingerprint();
        if found != self.dataset_fingerprint {
            return Err(Error::Bundle(format!(
                "dataset {} has fingerprint {found}, bundle was built from {}",
                path.display(),
                self.dataset_fingerprint
            )));
        }
        let normalizer = Normalizer::fit(&raw, self.normalization);
        let dataset = normalizer.apply(&raw);
        if self.graph.node_count() != dataset.n_instances() {
            return Err(Error::GraphDatasetMismatch(format!(
                "{} nodes for {} rows",
                self.graph.node_count(),
                dataset.n_instances()
            )));
        }
        let network = Network {
            graph: self.graph.clone(),
            config: self.config,
            epsilon: self.epsilon,
        };
        Ok(Trained {
            dataset,
            normalizer,
            network,
        })
    }
}
