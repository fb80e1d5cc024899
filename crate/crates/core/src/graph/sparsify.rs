use std::io::Write;

use super::CoInteractionMatrix;
use crate::error::{Error, Result};

/// Binary adjacency keeping at most `N` neighbours per row.
///
/// Rows are selected independently, so the result is generally asymmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsifiedAdjacency {
    num_items: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    sparsification_n: usize,
}

impl SparsifiedAdjacency {
    /// Builds an adjacency from explicit per-row neighbour lists.
    /// Columns are sorted and deduplicated; `sparsification_n` is set to the
    /// widest row.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let num_items = rows.len();
        let mut row_offsets = Vec::with_capacity(num_items + 1);
        let mut cols = Vec::new();
        let mut widest = 0;
        row_offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            if let Some(&j) = row.iter().find(|&&j| j >= num_items) {
                return Err(Error::Range {
                    index: j,
                    limit: num_items,
                });
            }
            widest = widest.max(row.len());
            cols.extend(row);
            row_offsets.push(cols.len());
        }
        Ok(Self {
            num_items,
            row_offsets,
            cols,
            sparsification_n: widest,
        })
    }

    /// Undirected edge list, stored in both directions.
    pub fn from_undirected_edges(num_items: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut rows = vec![Vec::new(); num_items];
        for &(a, b) in edges {
            if a >= num_items || b >= num_items {
                return Err(Error::Range {
                    index: a.max(b),
                    limit: num_items,
                });
            }
            rows[a].push(b);
            rows[b].push(a);
        }
        Self::from_rows(rows)
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn sparsification_n(&self) -> usize {
        self.sparsification_n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.cols[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_items).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    /// Directed edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_items).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j)))
    }

    /// Debug dump as `i<TAB>j<TAB>1` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i}\t{j}\t1")?;
        }
        Ok(())
    }
}

/// Row-wise TopN: keeps the `n` largest counts in each row, ties going to
/// the smaller column index, and binarizes them.
pub fn sparsify_topn(g: &CoInteractionMatrix, n: usize) -> Result<SparsifiedAdjacency> {
    if n == 0 {
        return Err(Error::InvalidConfig("TopN requires N >= 1".into()));
    }
    let num_items = g.num_items();
    let mut row_offsets = Vec::with_capacity(num_items + 1);
    let mut cols = Vec::new();
    row_offsets.push(0);
    let mut scratch: Vec<(u32, usize)> = Vec::new();
    for i in 0..num_items {
        let (js, cs) = g.row(i);
        if js.len() <= n {
            cols.extend_from_slice(js);
        } else {
            scratch.clear();
            scratch.extend(cs.iter().copied().zip(js.iter().copied()));
            let by_rank = |a: &(u32, usize), b: &(u32, usize)| b.0.cmp(&a.0).then(a.1.cmp(&b.1));
            scratch.select_nth_unstable_by(n - 1, by_rank);
            let mut kept: Vec<usize> = scratch[..n].iter().map(|&(_, j)| j).collect();
            kept.sort_unstable();
            cols.extend(kept);
        }
        row_offsets.push(cols.len());
    }
    Ok(SparsifiedAdjacency {
        num_items,
        row_offsets,
        cols,
        sparsification_n: n,
    })
}
