//! Item-item graph construction and the normalized operators built on it.

mod operator;
mod project;
mod sparsify;

pub use operator::{
    apply_operator, row_normalize, sym_normalize, OperatorKind, PropagationOperator,
};
pub use project::{project_item_item, CoInteractionMatrix};
pub use sparsify::{sparsify_topn, SparsifiedAdjacency};

use crate::error::Result;
use crate::ingest::InteractionMatrix;

/// Projection followed by TopN sparsification.
pub fn build_item_graph(r: &InteractionMatrix, top_n: usize) -> Result<SparsifiedAdjacency> {
    sparsify_topn(&project_item_item(r), top_n)
}
