use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Per-item, per-modality availability. `true` means the whole feature row of
/// that modality is present.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AvailabilityMask {
    num_items: usize,
    num_modalities: usize,
    bits: Vec<bool>,
}

impl AvailabilityMask {
    pub fn all_available(num_items: usize, num_modalities: usize) -> Self {
        Self {
            num_items,
            num_modalities,
            bits: vec![true; num_items * num_modalities],
        }
    }

    /// Stacks per-modality columns.
    pub fn from_columns(columns: &[Vec<bool>]) -> Result<Self> {
        let num_items = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != num_items) {
            return Err(Error::ShapeMismatch(format!(
                "mask column of length {} among columns of length {num_items}",
                c.len()
            )));
        }
        let num_modalities = columns.len();
        let mut bits = vec![true; num_items * num_modalities];
        for (m, col) in columns.iter().enumerate() {
            for (i, &b) in col.iter().enumerate() {
                bits[i * num_modalities + m] = b;
            }
        }
        Ok(Self {
            num_items,
            num_modalities,
            bits,
        })
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_modalities(&self) -> usize {
        self.num_modalities
    }

    pub fn is_available(&self, item: usize, modality: usize) -> bool {
        self.bits[item * self.num_modalities + modality]
    }

    pub fn set(&mut self, item: usize, modality: usize, available: bool) {
        self.bits[item * self.num_modalities + modality] = available;
    }

    pub fn column(&self, modality: usize) -> Vec<bool> {
        (0..self.num_items)
            .map(|i| self.is_available(i, modality))
            .collect()
    }

    /// Items missing the given modality, ascending.
    pub fn missing(&self, modality: usize) -> Vec<usize> {
        (0..self.num_items)
            .filter(|&i| !self.is_available(i, modality))
            .collect()
    }

    pub fn missing_count(&self, modality: usize) -> usize {
        (0..self.num_items)
            .filter(|&i| !self.is_available(i, modality))
            .count()
    }
}

/// Parses a missing-index list into an availability column of `num_items`.
/// Blank lines and `#` comments are skipped; repeated indices are harmless.
pub fn parse_mask<R: BufRead>(source: R, num_items: usize) -> Result<Vec<bool>> {
    let mut column = vec![true; num_items];
    for (n, line) in source.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let ix: usize = body.parse().map_err(|_| Error::Parse {
            line: n + 1,
            message: format!("bad item index {body:?}"),
        })?;
        if ix >= num_items {
            return Err(Error::Range {
                index: ix,
                limit: num_items,
            });
        }
        column[ix] = false;
    }
    Ok(column)
}

pub fn read_mask(path: &Path, num_items: usize) -> Result<Vec<bool>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_mask(std::io::BufReader::new(file), num_items)
}

/// Writes the missing indices of an availability column, one per line.
pub fn write_mask<W: Write>(column: &[bool], mut out: W) -> std::io::Result<()> {
    for (i, _) in column.iter().enumerate().filter(|(_, &a)| !a) {
        writeln!(out, "{i}")?;
    }
    Ok(())
}
