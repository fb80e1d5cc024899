use crate::ingest::InteractionMatrix;

/// Item-item co-interaction counts (`R^T R` without its diagonal), row-compressed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoInteractionMatrix {
    num_items: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    counts: Vec<u32>,
}

impl CoInteractionMatrix {
    /// Rows of `(column, count)`; used to feed already-binarized graphs back
    /// through TopN.
    #[cfg(test)]
    pub(crate) fn from_rows(rows: Vec<Vec<(usize, u32)>>) -> Self {
        let num_items = rows.len();
        let mut row_offsets = vec![0];
        let mut cols = Vec::new();
        let mut counts = Vec::new();
        for mut row in rows {
            row.sort_unstable();
            for (j, c) in row {
                cols.push(j);
                counts.push(c);
            }
            row_offsets.push(cols.len());
        }
        Self {
            num_items,
            row_offsets,
            cols,
            counts,
        }
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Neighbours of `i` in ascending order with their shared-user counts.
    pub fn row(&self, i: usize) -> (&[usize], &[u32]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.cols[r.clone()], &self.counts[r])
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        let (cols, counts) = self.row(i);
        cols.binary_search(&j).map_or(0, |k| counts[k])
    }
}

/// Projects the user-item incidence onto the item partition.
pub fn project_item_item(r: &InteractionMatrix) -> CoInteractionMatrix {
    let n = r.num_items();
    // item -> users
    let mut item_users: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, i) in r.pairs() {
        item_users[i].push(u);
    }

    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut counts = Vec::new();
    row_offsets.push(0);

    let mut acc = vec![0u32; n];
    let mut touched = Vec::new();
    for i in 0..n {
        for &u in &item_users[i] {
            for &j in r.user_items(u) {
                if j == i {
                    continue;
                }
                if acc[j] == 0 {
                    touched.push(j);
                }
                acc[j] += 1;
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            cols.push(j);
            counts.push(acc[j]);
            acc[j] = 0;
        }
        touched.clear();
        row_offsets.push(cols.len());
    }
    CoInteractionMatrix {
        num_items: n,
        row_offsets,
        cols,
        counts,
    }
}
