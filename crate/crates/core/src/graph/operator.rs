use rayon::prelude::*;

use super::SparsifiedAdjacency;
use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `D^-1 A`
    RowStochastic,
    /// `D^-1/2 A D^-1/2`
    Symmetric,
    /// Anything built by hand through [`PropagationOperator::from_entries`].
    Custom,
}

/// Sparse weighted item-item operator, row-compressed with ascending columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOperator<T> {
    kind: OperatorKind,
    num_items: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<T>,
    row_degrees: Vec<usize>,
}

impl<T: Scalar> PropagationOperator<T> {
    /// Builds an operator from `(row, col, weight)` triplets. Duplicates are
    /// summed; `row_degrees` counts the distinct stored columns per row.
    pub fn from_entries(num_items: usize, entries: &[(usize, usize, T)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); num_items];
        for &(i, j, w) in entries {
            if i >= num_items || j >= num_items {
                return Err(Error::Range {
                    index: i.max(j),
                    limit: num_items,
                });
            }
            rows[i].push((j, w));
        }
        let mut row_offsets = vec![0];
        let mut cols = Vec::new();
        let mut weights: Vec<T> = Vec::new();
        let mut row_degrees = Vec::with_capacity(num_items);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let start = cols.len();
            for (j, w) in row {
                if cols.len() > start && cols.last() == Some(&j) {
                    *weights.last_mut().expect("non-empty") += w;
                } else {
                    cols.push(j);
                    weights.push(w);
                }
            }
            row_degrees.push(cols.len() - start);
            row_offsets.push(cols.len());
        }
        Ok(Self {
            kind: OperatorKind::Custom,
            num_items,
            row_offsets,
            cols,
            weights,
            row_degrees,
        })
    }

    fn with_weights(
        kind: OperatorKind,
        a: &SparsifiedAdjacency,
        weight: impl Fn(usize, usize) -> Option<T>,
    ) -> Self {
        let n = a.num_items();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(a.nnz());
        let mut weights = Vec::with_capacity(a.nnz());
        row_offsets.push(0);
        for i in 0..n {
            for &j in a.row(i) {
                if let Some(w) = weight(i, j) {
                    cols.push(j);
                    weights.push(w);
                }
            }
            row_offsets.push(cols.len());
        }
        Self {
            kind,
            num_items: n,
            row_offsets,
            cols,
            weights,
            row_degrees: a.degrees(),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Out-degree of each row in the adjacency the operator came from.
    pub fn row_degrees(&self) -> &[usize] {
        &self.row_degrees
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    /// Dense copy, row-major. Intended for small systems.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.num_items;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            let (cols, ws) = self.row(i);
            for (&j, &w) in cols.iter().zip(ws) {
                out[i * n + j] = w;
            }
        }
        out
    }

    /// `out = P F`, writing into a caller-provided buffer of the same shape.
    pub fn apply_into(&self, f: &FeatureMatrix<T>, out: &mut FeatureMatrix<T>) -> Result<()> {
        if f.rows() != self.num_items || out.rows() != f.rows() || out.cols() != f.cols() {
            return Err(Error::ShapeMismatch(format!(
                "operator over {} items applied to {}x{} features",
                self.num_items,
                f.rows(),
                f.cols()
            )));
        }
        let dim = f.cols();
        if dim == 0 {
            return Ok(());
        }
        out.as_mut_slice()
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, dst)| {
                dst.iter_mut().for_each(|v| *v = T::zero());
                let (cols, ws) = self.row(i);
                for (&j, &w) in cols.iter().zip(ws) {
                    for (d, &s) in dst.iter_mut().zip(f.row(j)) {
                        *d += w * s;
                    }
                }
            });
        Ok(())
    }
}

/// `D^-1 A`: each edge of a row weighs `1 / degree`. Isolated rows stay empty.
pub fn row_normalize<T: Scalar>(a: &SparsifiedAdjacency) -> PropagationOperator<T> {
    let inv: Vec<T> = a
        .degrees()
        .into_iter()
        .map(|d| {
            if d > 0 {
                T::one() / T::of_usize(d)
            } else {
                T::zero()
            }
        })
        .collect();
    PropagationOperator::with_weights(OperatorKind::RowStochastic, a, |i, _| Some(inv[i]))
}

/// `D^-1/2 A D^-1/2` with `D` the row out-degrees of `A`.
pub fn sym_normalize<T: Scalar>(a: &SparsifiedAdjacency) -> PropagationOperator<T> {
    let degrees = a.degrees();
    PropagationOperator::with_weights(OperatorKind::Symmetric, a, |i, j| {
        let (di, dj) = (degrees[i], degrees[j]);
        (di > 0 && dj > 0).then(|| T::one() / T::of_usize(di * dj).sqrt())
    })
}

/// `P F` into a freshly allocated matrix.
pub fn apply_operator<T: Scalar>(
    p: &PropagationOperator<T>,
    f: &FeatureMatrix<T>,
) -> Result<FeatureMatrix<T>> {
    let mut out = FeatureMatrix::zeros(f.rows(), f.cols());
    p.apply_into(f, &mut out)?;
    Ok(out)
}
