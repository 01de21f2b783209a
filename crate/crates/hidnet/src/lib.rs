//! High-order graph diffusion: normalized graph operators, the generalized
//! diffusion iteration with fidelity term, its random-walk face, neighbor
//! label-similarity scores, a decoupled MLP-plus-propagation classifier, and
//! the perturbation / experiment harness behind the `hidnet` CLI.

pub mod classifier;
pub mod dataset;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod homophily;
pub mod matrix;
pub mod metrics;
pub mod perturb;
pub mod solver;
pub mod sparse;
pub mod stats;
pub mod train;
pub mod verify;
pub mod walk;

#[cfg(test)]
pub(crate) mod testutil;

pub use dataset::{DatasetBundle, LabelVector, LabeledSplit, SyntheticSpec};
pub use diffusion::{DiffusionConfig, Mode};
pub use error::{Error, Result};
pub use graph::{build_graph, khop_neighbors, normalize, Graph, NormalizedOperator};
pub use matrix::DenseMatrix;
