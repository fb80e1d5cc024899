use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MMFI_MAGIC: [u8; 4] = *b"MMFI";
pub const MMFI_VERSION: u16 = 1;
pub const MMFI_DTYPE_F32: u16 = 1;
const MMFI_HEADER_LEN: usize = 4 + 2 + 2 + 8 + 8;

/// Dense row-major `items x dim` feature matrix for one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(values.len()) {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows.saturating_mul(cols),
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    pub fn cast<U: Scalar>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| v.cast()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|v| v.is_zero())
    }
}

/// Serializes an `f32` matrix in the MMFI layout.
pub fn encode_mmfi(m: &FeatureMatrix<f32>) -> Vec<u8> {
    let mut out = Vec::with_capacity(MMFI_HEADER_LEN + 4 * m.values.len());
    out.extend_from_slice(&MMFI_MAGIC);
    out.extend_from_slice(&MMFI_VERSION.to_le_bytes());
    out.extend_from_slice(&MMFI_DTYPE_F32.to_le_bytes());
    out.extend_from_slice(&(m.rows as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols as u64).to_le_bytes());
    for v in &m.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_mmfi(bytes: &[u8]) -> Result<FeatureMatrix<f32>> {
    if bytes.len() < MMFI_HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MMFI_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        return Err(Error::Truncated {
            expected: MMFI_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    if bytes[..4] != MMFI_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u16_at(4);
    if version != MMFI_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dtype = u16_at(6);
    if dtype != MMFI_DTYPE_F32 {
        return Err(Error::Format(format!("unsupported dtype {dtype}")));
    }
    let rows = u64_at(8);
    let cols = u64_at(16);
    let payload = (bytes.len() - MMFI_HEADER_LEN) as u64;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("header shape overflows".into()))?;
    if payload != expected {
        return Err(Error::Truncated {
            expected,
            found: payload,
        });
    }
    let values = bytes[MMFI_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    FeatureMatrix::new(rows as usize, cols as usize, values)
}

/// Parses the TSV fallback: `item_index<TAB>v1<TAB>...<TAB>vC`, every index
/// in `0..n` present exactly once, any order.
pub fn parse_features_tsv<R: BufRead>(source: R) -> Result<FeatureMatrix<f32>> {
    let mut rows: Vec<Option<Vec<f32>>> = Vec::new();
    let mut cols: Option<usize> = None;
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let ix: usize = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: line_no,
                message: "bad item index".into(),
            })?;
        let vals = fields
            .map(|f| f.trim().parse::<f32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        match cols {
            None => cols = Some(vals.len()),
            Some(c) if c != vals.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {c} values, found {}", vals.len()),
                })
            }
            _ => {}
        }
        if ix >= rows.len() {
            rows.resize(ix + 1, None);
        }
        if rows[ix].replace(vals).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("item index {ix} repeated"),
            });
        }
    }
    let cols = cols.ok_or(Error::EmptyDataset)?;
    let mut values = Vec::with_capacity(rows.len() * cols);
    for (i, r) in rows.into_iter().enumerate() {
        let r = r.ok_or_else(|| Error::Format(format!("item index {i} has no feature row")))?;
        values.extend(r);
    }
    FeatureMatrix::new(values.len() / cols.max(1), cols, values)
}

/// Reads an MMFI file, or the TSV fallback when the magic is absent.
pub fn read_features(path: &Path) -> Result<FeatureMatrix<f32>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(&MMFI_MAGIC) || looks_binary(&bytes) {
        decode_mmfi(&bytes)
    } else {
        parse_features_tsv(bytes.as_slice())
    }
}

fn looks_binary(bytes: &[u8]) -> bool {
    std::str::from_utf8(&bytes[..bytes.len().min(64)]).is_err()
}

pub fn write_features(path: &Path, m: &FeatureMatrix<f32>) -> Result<()> {
    std::fs::write(path, encode_mmfi(m)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mmfi_bytes(rows: u64, cols: u64, payload: &[f32]) -> Vec<u8> {
        let mut b = b"MMFI".to_vec();
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&rows.to_le_bytes());
        b.extend_from_slice(&cols.to_le_bytes());
        for v in payload {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    #[test]
    fn decode_small() {
        let b = mmfi_bytes(2, 3, &[1., 2., 3., 4., 5., 6.]);
        let m = decode_mmfi(&b).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.row(0), &[1., 2., 3.]);
        assert_eq!(m.row(1), &[4., 5., 6.]);
        assert_eq!(encode_mmfi(&m), b);
    }

    #[test]
    fn bad_magic_and_version() {
        let mut b = mmfi_bytes(1, 1, &[1.0]);
        b[0] = b'X';
        assert!(matches!(decode_mmfi(&b), Err(Error::Format(_))));
        let mut b = mmfi_bytes(1, 1, &[1.0]);
        b[4] = 2;
        assert!(matches!(decode_mmfi(&b), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload() {
        let mut b = mmfi_bytes(2, 2, &[1., 2., 3., 4.]);
        b.pop();
        assert!(matches!(
            decode_mmfi(&b),
            Err(Error::Truncated {
                expected: 16,
                found: 15
            })
        ));
        assert!(matches!(
            decode_mmfi(b"MMFI\x01"),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn random_round_trip_through_file() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f32> = (0..100 * 64).map(|_| rng.random_range(-5.0..5.0)).collect();
        let m = FeatureMatrix::new(100, 64, vals).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.mmfi");
        write_features(&p, &m).unwrap();
        let back = read_features(&p).unwrap();
        let max_diff = m
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f32, f32::max);
        assert_eq!(max_diff, 0.0);
        let bytes = std::fs::read(&p).unwrap();
        write_features(&p, &back).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
    }

    #[test]
    fn tsv_fallback() {
        let m = parse_features_tsv("1\t3\t4\n0\t1\t2\n".as_bytes()).unwrap();
        assert_eq!(m.as_slice(), &[1., 2., 3., 4.]);
        assert!(parse_features_tsv("2\t3\t4\n0\t1\t2\n".as_bytes()).is_err());
        assert!(parse_features_tsv("0\t3\t4\n1\t1\n".as_bytes()).is_err());
    }
}
