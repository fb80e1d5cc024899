mod common;

use common::*;
use mmimpute::graph::{apply_operator, row_normalize, sym_normalize, SparsifiedAdjacency};
use mmimpute::impute::{
    heat_kernel, impute, ppr_neumann, step_heat, step_multihop, step_neigh_mean,
    step_pers_pagerank, ImputationConfig, Method,
};
use mmimpute::ingest::FeatureMatrix;

fn zeroed(f: &FeatureMatrix<f64>, available: &[bool]) -> FeatureMatrix<f64> {
    let mut x = f.clone();
    for (i, &a) in available.iter().enumerate() {
        if !a {
            x.row_mut(i).iter_mut().for_each(|v| *v = 0.0);
        }
    }
    x
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn ring(n: usize, d: usize) -> SparsifiedAdjacency {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (1..=d / 2).map(move |k| (i, (i + k) % n)))
        .collect();
    SparsifiedAdjacency::from_undirected_edges(n, &edges).unwrap()
}

#[test]
fn neigh_mean_matches_dense_product() {
    let mut r = rng(1);
    let a = random_directed(&mut r, 30, 0.15);
    let f = random_features(&mut r, 30, 5);
    let got = step_neigh_mean(&f, &row_normalize(&a)).unwrap();
    let want = dense_row_normalized(&a) * to_dmatrix(&f);
    assert!(rel_frobenius(&to_dmatrix(&got), &want) < 1e-6);
}

#[test]
fn neigh_mean_of_identical_neighbours() {
    let a = SparsifiedAdjacency::from_undirected_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let f = FeatureMatrix::new(4, 2, vec![0.0f64, 0.0, 0.3, -2.0, 0.3, -2.0, 0.3, -2.0]).unwrap();
    let out = step_neigh_mean(&f, &row_normalize(&a)).unwrap();
    assert!((out.get(0, 0) - 0.3).abs() < 1e-15 && (out.get(0, 1) + 2.0).abs() < 1e-15);
}

#[test]
fn multihop_matches_dense_oracle() {
    let mut r = rng(2);
    let a = random_directed(&mut r, 40, 0.1);
    let f = random_features(&mut r, 40, 8);
    let avail = random_mask(&mut r, 40, 0.25);
    let missing = missing_rows(&avail);
    let mut cfg = ImputationConfig::new(Method::MultiHop);
    cfg.hops = 10;
    cfg.tolerance = 0.0;
    let got = impute(&f, &avail, &a, &cfg).unwrap();
    let want = iterate_with_reset(&dense_sym_normalized(&a), &to_dmatrix(&f), &avail, 10);
    let rows: Vec<usize> = missing.into_iter().filter(|&i| a.degree(i) > 0).collect();
    assert!(rel_frobenius_rows(&to_dmatrix(&got.features), &want, &rows) < 1e-6);

    let p = sym_normalize(&a);
    let (x, t) = step_multihop(zeroed(&f, &avail), &p, &f, &avail, 20, 0.0).unwrap();
    assert_eq!(t, 20);
    let want = iterate_with_reset(&dense_sym_normalized(&a), &to_dmatrix(&f), &avail, 20);
    assert!(rel_frobenius(&to_dmatrix(&x), &want) < 1e-6);
}

#[test]
fn multihop_single_direction() {
    let a = SparsifiedAdjacency::from_undirected_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
    let v = [0.6, -0.2, 1.4];
    let mut vals = v.to_vec();
    vals.extend([0.0; 3]);
    vals.extend(v);
    let f = FeatureMatrix::new(3, 3, vals).unwrap();
    let avail = [true, false, true];
    for hops in [1, 2, 7, 20] {
        let (x, _) = step_multihop(
            zeroed(&f, &avail),
            &sym_normalize(&a),
            &f,
            &avail,
            hops,
            0.0,
        )
        .unwrap();
        assert!((cosine(x.row(1), &v) - 1.0).abs() < 1e-6);
        assert!(x.row(1)[0] / v[0] > 0.0);
    }
}

#[test]
fn multihop_one_hop_is_one_application_plus_reset() {
    let mut r = rng(3);
    let a = random_directed(&mut r, 15, 0.3);
    let f = random_features(&mut r, 15, 4);
    let avail = random_mask(&mut r, 15, 0.4);
    let p = sym_normalize(&a);
    let x0 = zeroed(&f, &avail);
    let (x, t) = step_multihop(x0.clone(), &p, &f, &avail, 1, 1e-6).unwrap();
    assert_eq!(t, 1);
    let mut want = apply_operator(&p, &x0).unwrap();
    for i in (0..15).filter(|&i| avail[i]) {
        want.row_mut(i).copy_from_slice(f.row(i));
    }
    assert_eq!(x, want);
}

#[test]
fn neigh_mean_equals_one_hop_with_same_operator() {
    let mut r = rng(4);
    for _ in 0..5 {
        let a = random_directed(&mut r, 20, 0.2);
        let f = random_features(&mut r, 20, 3);
        let avail = random_mask(&mut r, 20, 0.3);
        let p = row_normalize(&a);
        let x0 = zeroed(&f, &avail);
        let mut neigh = step_neigh_mean(&x0, &p).unwrap();
        for i in (0..20).filter(|&i| avail[i]) {
            neigh.row_mut(i).copy_from_slice(f.row(i));
        }
        let (hop, _) = step_multihop(x0, &p, &f, &avail, 1, 0.0).unwrap();
        assert_eq!(neigh, hop);
    }
}

#[test]
fn ppr_dense_path_matches_inverse_oracle() {
    let mut r = rng(5);
    let a = random_directed(&mut r, 20, 0.2);
    let f = random_features(&mut r, 20, 6);
    let avail = vec![true; 20];
    let p = sym_normalize(&a);
    // all available rows reset, so compare the raw operator on one step with no reset
    let none = vec![false; 20];
    let (x, _) = step_pers_pagerank(f.clone(), &p, &f, &none, 0.15, 1, 64, 2048, 0.0).unwrap();
    let want = ppr_dense(&dense_sym_normalized(&a), 0.15) * to_dmatrix(&f);
    assert!(rel_frobenius(&to_dmatrix(&x), &want) < 1e-10);
    let (y, _) = step_pers_pagerank(f.clone(), &p, &f, &avail, 0.15, 1, 64, 2048, 0.0).unwrap();
    assert_eq!(y, f);
}

fn neumann_instance() -> (SparsifiedAdjacency, FeatureMatrix<f64>) {
    let mut r = rng(6);
    let a = random_undirected(&mut r, 20, 0.25);
    let f = random_features(&mut r, 20, 6);
    (a, f)
}

#[test]
fn ppr_neumann_within_truncation_bound() {
    let (a, f) = neumann_instance();
    let p = sym_normalize(&a);
    let exact = ppr_dense(&dense_sym_normalized(&a), 0.15) * to_dmatrix(&f);
    for k in [16, 64] {
        let got = to_dmatrix(&ppr_neumann(&p, 0.15, k, &f).unwrap());
        let bound = 0.85f64.powi(k as i32) / 0.15 * to_dmatrix(&f).norm();
        assert!((got - &exact).norm() <= bound);
    }
    // the sparse branch of the step function is the same series
    let none = vec![false; 20];
    let (x, _) = step_pers_pagerank(f.clone(), &p, &f, &none, 0.15, 1, 64, 0, 0.0).unwrap();
    assert_eq!(x, ppr_neumann(&p, 0.15, 64, &f).unwrap());
}

#[test]
fn ppr_neumann_matches_inverse_oracle_at_high_order() {
    let (a, f) = neumann_instance();
    let got = ppr_neumann(&sym_normalize(&a), 0.15, 96, &f).unwrap();
    let want = ppr_dense(&dense_sym_normalized(&a), 0.15) * to_dmatrix(&f);
    let err = rel_frobenius(&to_dmatrix(&got), &want);
    assert!(err < 1e-5, "relative error {err:e}");
}

/// At K = 64 the component along the top eigenvector of S keeps a relative
/// error of exactly 0.85^64 = 3.0e-5, so 1e-5 is out of reach whenever the
/// output is dominated by that component.
#[test]
#[ignore = "truncation floor (1 - a)^K = 3.0e-5 exceeds the 1e-5 target at K = 64"]
fn ppr_neumann_matches_inverse_oracle() {
    let (a, f) = neumann_instance();
    let got = ppr_neumann(&sym_normalize(&a), 0.15, 64, &f).unwrap();
    let want = ppr_dense(&dense_sym_normalized(&a), 0.15) * to_dmatrix(&f);
    let err = rel_frobenius(&to_dmatrix(&got), &want);
    assert!(err < 1e-5, "relative error {err:e}");
}

#[test]
fn ppr_truncation_error_shrinks_with_order() {
    let mut r = rng(7);
    let a = random_directed(&mut r, 25, 0.2);
    let f = random_features(&mut r, 25, 4);
    let p = sym_normalize(&a);
    let want = ppr_dense(&dense_sym_normalized(&a), 0.15) * to_dmatrix(&f);
    let errs: Vec<f64> = [4, 16, 64]
        .iter()
        .map(|&k| rel_frobenius(&to_dmatrix(&ppr_neumann(&p, 0.15, k, &f).unwrap()), &want))
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn ppr_alpha_one_is_identity() {
    let mut r = rng(8);
    let a = random_directed(&mut r, 12, 0.3);
    let f = random_features(&mut r, 12, 3);
    let avail = random_mask(&mut r, 12, 0.5);
    let x0 = zeroed(&f, &avail);
    let p = sym_normalize(&a);
    for threshold in [0, 2048] {
        let (x, _) =
            step_pers_pagerank(x0.clone(), &p, &x0, &avail, 1.0, 5, 30, threshold, 0.0).unwrap();
        assert_eq!(x, x0);
    }
    assert_eq!(ppr_neumann(&p, 1.0, 30, &f).unwrap(), f);
}

#[test]
fn ppr_alpha_zero_neumann_diverges() {
    let a = ring(6, 2);
    let f = FeatureMatrix::<f64>::zeros(6, 1);
    let err = ppr_neumann(&sym_normalize(&a), 0.0, 30, &f).unwrap_err();
    assert!(err.to_string().contains("does not converge"));
}

#[test]
fn ppr_and_heat_preserve_constants_on_regular_graphs() {
    let a = ring(12, 4);
    let p = sym_normalize(&a);
    let f = FeatureMatrix::new(12, 2, [1.5f64, -0.5].repeat(12)).unwrap();
    for out in [
        ppr_neumann(&p, 0.15, 200, &f).unwrap(),
        heat_kernel(&p, 1.0, 30, &f).unwrap(),
    ] {
        for i in 0..12 {
            assert!((out.get(i, 0) - 1.5).abs() < 1e-9 && (out.get(i, 1) + 0.5).abs() < 1e-9);
        }
    }
    let none = vec![false; 12];
    let (x, _) = step_pers_pagerank(f.clone(), &p, &f, &none, 0.15, 1, 30, 2048, 0.0).unwrap();
    assert!(x
        .as_slice()
        .iter()
        .zip(f.as_slice())
        .all(|(a, b)| (a - b).abs() < 1e-9));
}

#[test]
fn heat_zero_time_is_identity() {
    let mut r = rng(9);
    let a = random_directed(&mut r, 12, 0.3);
    let f = random_features(&mut r, 12, 3);
    let avail = random_mask(&mut r, 12, 0.5);
    let x0 = zeroed(&f, &avail);
    let (x, _) = step_heat(x0.clone(), &sym_normalize(&a), &x0, &avail, 0.0, 3, 30, 0.0).unwrap();
    assert_eq!(x, x0);
}

#[test]
fn heat_matches_eigendecomposition() {
    let mut r = rng(10);
    let a = random_undirected(&mut r, 10, 0.4);
    let f = random_features(&mut r, 10, 4);
    let got = heat_kernel(&sym_normalize(&a), 1.0, 30, &f).unwrap();
    let want = heat_dense(&dense_sym_normalized(&a), 1.0) * to_dmatrix(&f);
    assert!(rel_frobenius(&to_dmatrix(&got), &want) < 1e-5);
}

#[test]
fn heat_overflow_is_reported() {
    let a = ring(8, 2);
    let mut r = rng(11);
    let f = random_features(&mut r, 8, 2);
    let avail = vec![false; 8];
    let err = step_heat(f.clone(), &sym_normalize(&a), &f, &avail, 1e300, 1, 5, 0.0).unwrap_err();
    assert!(err.to_string().contains("series order"), "{err}");
}

#[test]
fn diffusions_are_linear() {
    let mut r = rng(12);
    for _ in 0..5 {
        let a = random_undirected(&mut r, 20, 0.2);
        let p = sym_normalize(&a);
        let x = random_features(&mut r, 20, 4);
        let y = random_features(&mut r, 20, 4);
        let sum = FeatureMatrix::new(
            20,
            4,
            x.as_slice()
                .iter()
                .zip(y.as_slice())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let none = vec![false; 20];
        let heat = |m: &FeatureMatrix<f64>| heat_kernel(&p, 1.5, 30, m).unwrap();
        let ppr = |m: &FeatureMatrix<f64>| {
            step_pers_pagerank(m.clone(), &p, m, &none, 0.2, 1, 30, 2048, 0.0)
                .unwrap()
                .0
        };
        for op in [
            &heat as &dyn Fn(&FeatureMatrix<f64>) -> FeatureMatrix<f64>,
            &ppr,
        ] {
            let lhs = to_dmatrix(&op(&sum));
            let rhs = to_dmatrix(&op(&x)) + to_dmatrix(&op(&y));
            assert!((lhs - &rhs).norm() <= 1e-6 * rhs.norm().max(1.0));
        }
    }
}
