use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Binary user-item incidence matrix stored row-compressed by user.
///
/// Item indices within each user row are strictly increasing, so duplicate
/// pairs are impossible by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMatrix {
    num_users: usize,
    num_items: usize,
    row_offsets: Vec<usize>,
    items: Vec<usize>,
}

impl InteractionMatrix {
    /// Builds the matrix from arbitrary (user, item) pairs; duplicates collapse.
    pub fn from_pairs(
        num_users: usize,
        num_items: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); num_users];
        for (u, i) in pairs {
            if u >= num_users {
                return Err(Error::Range {
                    index: u,
                    limit: num_users,
                });
            }
            if i >= num_items {
                return Err(Error::Range {
                    index: i,
                    limit: num_items,
                });
            }
            rows[u].push(i);
        }
        let mut row_offsets = Vec::with_capacity(num_users + 1);
        let mut items = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            items.extend_from_slice(&row);
            row_offsets.push(items.len());
        }
        Ok(Self {
            num_users,
            num_items,
            row_offsets,
            items,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_interactions(&self) -> usize {
        self.items.len()
    }

    /// Sorted items of one user.
    pub fn user_items(&self, user: usize) -> &[usize] {
        &self.items[self.row_offsets[user]..self.row_offsets[user + 1]]
    }

    pub fn degree(&self, user: usize) -> usize {
        self.row_offsets[user + 1] - self.row_offsets[user]
    }

    pub fn contains(&self, user: usize, item: usize) -> bool {
        self.user_items(user).binary_search(&item).is_ok()
    }

    /// All (user, item) pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_users).flat_map(move |u| self.user_items(u).iter().map(move |&i| (u, i)))
    }
}

/// Dense index to original string id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the dense index of `id`, assigning the next free one on first sight.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&ix) = self.index.get(id) {
            return ix;
        }
        let ix = self.ids.len();
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), ix);
        ix
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, ix: usize) -> &str {
        &self.ids[ix]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.ids.iter().enumerate().map(|(i, s)| (i, s.as_str()))
    }

    /// Writes `dense_index<TAB>original_id` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (ix, id) in self.iter() {
            writeln!(out, "{ix}\t{id}")?;
        }
        Ok(())
    }

    /// Reads an id-map; dense indices must be `0..n` in order.
    pub fn read_tsv<R: BufRead>(source: R) -> Result<Self> {
        let mut map = IdMap::new();
        for (n, line) in source.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
            if line.is_empty() {
                continue;
            }
            let (ix, id) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: "expected `dense_index<TAB>original_id`".into(),
            })?;
            let ix: usize = ix.trim().parse().map_err(|_| Error::Parse {
                line: n + 1,
                message: format!("bad dense index {ix:?}"),
            })?;
            if ix != map.len() {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("dense index {ix} out of sequence"),
                });
            }
            map.intern(id);
        }
        Ok(map)
    }
}

/// Parsed interaction log with the id tables that produced its dense indices.
#[derive(Debug, Clone)]
pub struct ParsedInteractions {
    pub matrix: InteractionMatrix,
    pub users: IdMap,
    pub items: IdMap,
}

impl ParsedInteractions {
    /// Re-expresses the matrix with item indices taken from `map`, e.g. a
    /// persisted id-map that fixes feature-row order. Items in `map` absent
    /// from the log become isolated; items in the log absent from `map` are
    /// an error.
    pub fn align_items(&self, map: &IdMap) -> Result<InteractionMatrix> {
        let target: Vec<usize> = self
            .items
            .iter()
            .map(|(_, id)| {
                map.get(id)
                    .ok_or_else(|| Error::Format(format!("item {id:?} is missing from the id-map")))
            })
            .collect::<Result<_>>()?;
        InteractionMatrix::from_pairs(
            self.matrix.num_users(),
            map.len(),
            self.matrix.pairs().map(|(u, i)| (u, target[i])),
        )
    }

    /// Writes the log back as `user<TAB>item` with original ids, one line per
    /// stored pair in row-major order.
    pub fn write_tsv<W: Write>(
        &self,
        matrix: &InteractionMatrix,
        mut out: W,
    ) -> std::io::Result<()> {
        for (u, i) in matrix.pairs() {
            writeln!(out, "{}\t{}", self.users.id(u), self.items.id(i))?;
        }
        Ok(())
    }
}

/// Parses a `user<TAB>item[<TAB>...]` log. Extra columns are ignored and ids
/// are densely re-indexed in first-appearance order.
pub fn parse_interactions<R: BufRead>(source: R, has_header: bool) -> Result<ParsedInteractions> {
    let mut users = IdMap::new();
    let mut items = IdMap::new();
    let mut pairs = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if has_header && n == 0 {
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (user, item) = match (cols.next(), cols.next()) {
            (Some(u), Some(i)) if !u.is_empty() && !i.is_empty() => (u, i),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected at least two tab-separated columns".into(),
                })
            }
        };
        pairs.push((users.intern(user), items.intern(item)));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let matrix = InteractionMatrix::from_pairs(users.len(), items.len(), pairs)?;
    Ok(ParsedInteractions {
        matrix,
        users,
        items,
    })
}

pub fn read_interactions(path: &Path, has_header: bool) -> Result<ParsedInteractions> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_interactions(std::io::BufReader::new(file), has_header)
}
