//! LU factorization with partial pivoting for the exact PageRank solve.

use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

pub(crate) struct DenseLu<T> {
    n: usize,
    /// Packed `L` (unit diagonal, below) and `U` (on and above), row-major.
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    pub(crate) fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon() * T::of_usize(n.max(1));
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, a[i * n + k].abs()))
                    .fold(
                        (k, T::zero()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pivot > tiny) {
                return Err(Error::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    /// Solves `A X = B` for every column of `b` at once.
    pub(crate) fn solve(&self, b: &FeatureMatrix<T>) -> FeatureMatrix<T> {
        let n = self.n;
        let dim = b.cols();
        let mut x = FeatureMatrix::zeros(n, dim);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(b.row(p));
        }
        let xs = x.as_mut_slice();
        for i in 0..n {
            let (done, rest) = xs.split_at_mut(i * dim);
            let xi = &mut rest[..dim];
            for j in 0..i {
                let l = self.lu[i * n + j];
                if l.is_zero() {
                    continue;
                }
                for (d, &s) in xi.iter_mut().zip(&done[j * dim..(j + 1) * dim]) {
                    *d -= l * s;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = xs.split_at_mut((i + 1) * dim);
            let xi = &mut head[i * dim..];
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                if u.is_zero() {
                    continue;
                }
                let xj = &tail[(j - i - 1) * dim..(j - i) * dim];
                for (d, &s) in xi.iter_mut().zip(xj) {
                    *d -= u * s;
                }
            }
            let diag = self.lu[i * n + i];
            xi.iter_mut().for_each(|v| *v /= diag);
        }
        x
    }
}
