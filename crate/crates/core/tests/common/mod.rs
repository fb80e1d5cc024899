//! Dense reference implementations used as independent oracles.
#![allow(dead_code)]

use mmimpute::graph::SparsifiedAdjacency;
use mmimpute::ingest::FeatureMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn to_dmatrix(f: &FeatureMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(f.rows(), f.cols(), f.as_slice())
}

pub fn dense_adjacency(a: &SparsifiedAdjacency) -> DMatrix<f64> {
    let n = a.num_items();
    DMatrix::from_fn(n, n, |i, j| if a.has_edge(i, j) { 1.0 } else { 0.0 })
}

/// `D^-1 A` from scratch.
pub fn dense_row_normalized(a: &SparsifiedAdjacency) -> DMatrix<f64> {
    let m = dense_adjacency(a);
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let d: f64 = m.row(i).sum();
        if d > 0.0 {
            m[(i, j)] / d
        } else {
            0.0
        }
    })
}

/// `D^-1/2 A D^-1/2` from scratch, degrees = row sums.
pub fn dense_sym_normalized(a: &SparsifiedAdjacency) -> DMatrix<f64> {
    let m = dense_adjacency(a);
    let n = m.nrows();
    let d: Vec<f64> = (0..n).map(|i| m.row(i).sum()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        if d[i] > 0.0 && d[j] > 0.0 {
            m[(i, j)] / (d[i] * d[j]).sqrt()
        } else {
            0.0
        }
    })
}

pub fn zero_missing(f: &DMatrix<f64>, available: &[bool]) -> DMatrix<f64> {
    let mut x = f.clone();
    for (i, &a) in available.iter().enumerate() {
        if !a {
            x.row_mut(i).fill(0.0);
        }
    }
    x
}

pub fn reset(x: &mut DMatrix<f64>, f: &DMatrix<f64>, available: &[bool]) {
    for (i, &a) in available.iter().enumerate() {
        if a {
            x.set_row(i, &f.row(i));
        }
    }
}

/// Zero-init, `hops` applications of `op` each followed by reset.
pub fn iterate_with_reset(
    op: &DMatrix<f64>,
    f: &DMatrix<f64>,
    available: &[bool],
    hops: usize,
) -> DMatrix<f64> {
    let mut x = zero_missing(f, available);
    for _ in 0..hops {
        x = op * &x;
        reset(&mut x, f, available);
    }
    x
}

pub fn ppr_dense(s: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let n = s.nrows();
    let m = DMatrix::<f64>::identity(n, n) - s * (1.0 - alpha);
    m.try_inverse().expect("invertible") * alpha
}

/// `exp(-b (I - S))` through the eigendecomposition of symmetric `S`.
pub fn heat_dense(s: &DMatrix<f64>, b: f64) -> DMatrix<f64> {
    let n = s.nrows();
    let l = DMatrix::<f64>::identity(n, n) - s;
    let eig = l.symmetric_eigen();
    let q = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|lam| (-b * lam).exp()));
    q * d * q.transpose()
}

pub fn rel_frobenius(got: &DMatrix<f64>, want: &DMatrix<f64>) -> f64 {
    let den = want.norm();
    if den == 0.0 {
        got.norm()
    } else {
        (got - want).norm() / den
    }
}

/// Relative Frobenius distance over the listed rows only.
pub fn rel_frobenius_rows(got: &DMatrix<f64>, want: &DMatrix<f64>, rows: &[usize]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &i in rows {
        for c in 0..got.ncols() {
            num += (got[(i, c)] - want[(i, c)]).powi(2);
            den += want[(i, c)].powi(2);
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub fn random_undirected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SparsifiedAdjacency {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    SparsifiedAdjacency::from_undirected_edges(n, &edges).unwrap()
}

pub fn random_directed(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SparsifiedAdjacency {
    let rows = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && rng.random_bool(p)).collect())
        .collect();
    SparsifiedAdjacency::from_rows(rows).unwrap()
}

pub fn random_features(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> FeatureMatrix<f64> {
    FeatureMatrix::new(
        n,
        dim,
        (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

/// Availability with roughly `missing` fraction absent and at least one row available.
pub fn random_mask(rng: &mut ChaCha8Rng, n: usize, missing: f64) -> Vec<bool> {
    let mut m: Vec<bool> = (0..n).map(|_| !rng.random_bool(missing)).collect();
    if m.iter().all(|&a| !a) {
        m[0] = true;
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn missing_rows(available: &[bool]) -> Vec<usize> {
    (0..available.len()).filter(|&i| !available[i]).collect()
}
