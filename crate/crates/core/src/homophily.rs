//! Feature homophily of the item-item graph: mean cosine similarity between
//! the endpoint features of every stored edge whose endpoints both carry the
//! modality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SparsifiedAdjacency;
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomophilyEntry {
    /// `None` when no edge was usable.
    pub homophily: Option<f64>,
    pub edges_used: usize,
    pub edges_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomophilyReport {
    pub modalities: Vec<HomophilyEntry>,
}

/// Cosine similarity in `f64`; `None` if either vector has zero norm.
pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Option<f64> {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.as_f64(), y.as_f64());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    (na > 0.0 && nb > 0.0).then(|| dot / (na.sqrt() * nb.sqrt()))
}

pub fn feature_homophily<T: Scalar>(
    f: &FeatureMatrix<T>,
    available: &[bool],
    adjacency: &SparsifiedAdjacency,
) -> Result<HomophilyEntry> {
    if f.rows() != adjacency.num_items() || available.len() != f.rows() {
        return Err(Error::ShapeMismatch(format!(
            "graph over {} items, {} feature rows, mask of {}",
            adjacency.num_items(),
            f.rows(),
            available.len()
        )));
    }
    let mut sum = 0.0f64;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for (i, j) in adjacency.edges() {
        let sim = if available[i] && available[j] {
            cosine(f.row(i), f.row(j))
        } else {
            None
        };
        match sim {
            Some(s) => {
                sum += s;
                used += 1;
            }
            None => skipped += 1,
        }
    }
    Ok(HomophilyEntry {
        homophily: (used > 0).then(|| sum / used as f64),
        edges_used: used,
        edges_skipped: skipped,
    })
}

/// One entry per `(features, availability)` modality pair.
pub fn homophily_report<T: Scalar>(
    modalities: &[(&FeatureMatrix<T>, &[bool])],
    adjacency: &SparsifiedAdjacency,
) -> Result<HomophilyReport> {
    let modalities = modalities
        .iter()
        .map(|(f, a)| feature_homophily(f, a, adjacency))
        .collect::<Result<_>>()?;
    Ok(HomophilyReport { modalities })
}
