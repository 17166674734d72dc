//! Approximate tensor factorization of graphs that are close to `K₃ × G`.
//!
//! The crate reconstructs a tensor `K₃ × G̃` from a graph `H` obtained by
//! bounded per-vertex edge deletions, 3-colors `H` when the hidden factor
//! expands, generates benign and hard instances, and ships brute-force
//! oracles for small inputs.
//!
//! Thresholds and ε are generic over [`Scalar`]; the default is the exact
//! [`Rational`] type.

pub mod candidate;
pub mod color;
pub mod factoring;
pub mod graph;
pub mod hardness;
pub mod instance;
pub mod io;
pub mod matching;
pub mod oracles;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod structure;

pub use candidate::{CandidateGraph, Triangle, TriangleComponents, TriangleGraph};
pub use color::{ColorClass, Coloring3};
pub use factoring::{ComponentFactorization, FactorFailure, Partition3};
pub use graph::{tensor_product, EdgeSet, Graph, GraphError, VertexSet};
pub use instance::{BaseGraphKind, DeletionStrategy, LabeledInstance};
pub use matching::{MatchResult, WeightedBipartite};
pub use pipeline::{PipelineConfig, PipelineError, Reconstruction};
pub use scalar::{parse_rational, Rational, Scalar, WideRational};

/// Reconstruction with exact rational thresholds.
pub type ExactReconstruction = Reconstruction<Rational>;
/// Reconstruction with `f64` thresholds.
pub type FloatReconstruction = Reconstruction<f64>;
pub type ExactComponentFactorization = ComponentFactorization<Rational>;
pub type ExactMatchResult = MatchResult<Rational>;
pub type ExactWeightedBipartite = WeightedBipartite<Rational>;
pub type ExactCandidateGraph = CandidateGraph<Rational>;
