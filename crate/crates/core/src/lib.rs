//! Training-free imputation of missing item modality features.
//!
//! Available features of one modality are propagated over the item-item
//! co-interaction graph (the `R^T R` projection of the user-item matrix,
//! sparsified row-wise to its TopN strongest links) to fill items whose
//! feature vector is missing. Four graph-aware methods are provided
//! (neighbourhood mean, multi-hop propagation, personalized PageRank and heat
//! diffusion) alongside the zeros / random / global-mean baselines.
//!
//! Numeric routines are generic over [`Scalar`]; the aliases below fix the
//! precision. Feature files are always `f32` on disk.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod homophily;
pub mod impute;
pub mod ingest;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeaturesF32 = ingest::FeatureMatrix<f32>;
pub type FeaturesF64 = ingest::FeatureMatrix<f64>;
pub type OperatorF32 = graph::PropagationOperator<f32>;
pub type OperatorF64 = graph::PropagationOperator<f64>;
pub type ImputationResultF32 = impute::ImputationResult<f32>;
pub type ImputationResultF64 = impute::ImputationResult<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
