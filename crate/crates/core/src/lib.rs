//! Complex-network construction from tabular data and betweenness-based
//! high-level classification.
//!
//! The pipeline is: load a [`dataset::Dataset`], build a label-pure training
//! graph with one of the rules in [`netbuild`], and classify new rows with
//! [`hlclass::HighLevelClassifier`]. [`bench`](mod@bench) runs repeated stratified
//! cross-validation over that pipeline.

pub mod bench;
pub mod bundle;
pub mod dataset;
pub mod error;
pub mod export;
pub mod hlclass;
pub mod measures;
pub mod netbuild;

pub use error::{Error, Result};
