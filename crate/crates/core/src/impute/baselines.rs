//! Imputations that ignore the graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ImputationResult;
use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

fn check_mask<T: Scalar>(f: &FeatureMatrix<T>, available: &[bool]) -> Result<()> {
    if available.len() != f.rows() {
        return Err(Error::ShapeMismatch(format!(
            "mask of {} items for {} feature rows",
            available.len(),
            f.rows()
        )));
    }
    Ok(())
}

fn missing_rows(available: &[bool]) -> Vec<usize> {
    available
        .iter()
        .enumerate()
        .filter(|(_, &a)| !a)
        .map(|(i, _)| i)
        .collect()
}

fn finish<T: Scalar>(features: FeatureMatrix<T>, available: &[bool]) -> ImputationResult<T> {
    ImputationResult {
        features,
        imputed_rows: missing_rows(available),
        iterations_run: 0,
        fallback_rows: Vec::new(),
    }
}

/// Missing rows become the zero vector.
pub fn impute_zeros<T: Scalar>(
    f: &FeatureMatrix<T>,
    available: &[bool],
) -> Result<ImputationResult<T>> {
    check_mask(f, available)?;
    let mut out = f.clone();
    for i in missing_rows(available) {
        out.row_mut(i).iter_mut().for_each(|v| *v = T::zero());
    }
    Ok(finish(out, available))
}

/// Element-wise mean of the available rows.
pub fn global_mean<T: Scalar>(f: &FeatureMatrix<T>, available: &[bool]) -> Result<Vec<T>> {
    check_mask(f, available)?;
    let mut sum = vec![0.0f64; f.cols()];
    let mut count = 0usize;
    for (i, _) in available.iter().enumerate().filter(|(_, &a)| a) {
        for (s, &v) in sum.iter_mut().zip(f.row(i)) {
            *s += v.as_f64();
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::MissingEverything);
    }
    Ok(sum.into_iter().map(|s| T::of(s / count as f64)).collect())
}

/// Missing rows become the mean of the available rows.
pub fn impute_global_mean<T: Scalar>(
    f: &FeatureMatrix<T>,
    available: &[bool],
) -> Result<ImputationResult<T>> {
    let mean = global_mean(f, available)?;
    let mut out = f.clone();
    for i in missing_rows(available) {
        out.row_mut(i).copy_from_slice(&mean);
    }
    Ok(finish(out, available))
}

/// Missing entries drawn i.i.d. uniform over `[min, max]` of the available entries.
pub fn impute_random<T: Scalar>(
    f: &FeatureMatrix<T>,
    available: &[bool],
    seed: u64,
) -> Result<ImputationResult<T>> {
    check_mask(f, available)?;
    let (lo, hi) = available
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .flat_map(|(i, _)| f.row(i).iter().map(|v| v.as_f64()))
        .fold(None, |acc: Option<(f64, f64)>, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(Error::MissingEverything)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = f.clone();
    for i in missing_rows(available) {
        for v in out.row_mut(i) {
            *v = T::of(if lo < hi {
                rng.random_range(lo..=hi)
            } else {
                lo
            });
        }
    }
    Ok(finish(out, available))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> FeatureMatrix<f64> {
        FeatureMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn zeros_replace_missing_rows() {
        let f = m(&[&[1., 2.], &[3., 4.], &[5., 6.]]);
        let r = impute_zeros(&f, &[true, false, true]).unwrap();
        assert_eq!(r.features.row(1), &[0., 0.]);
        assert_eq!(r.features.row(2), &[5., 6.]);
        assert_eq!(r.imputed_rows, vec![1]);
        assert_eq!(impute_zeros(&f, &[true; 3]).unwrap().features, f);
    }

    #[test]
    fn zeros_count_oracle() {
        let f = FeatureMatrix::new(100, 3, (0..300).map(|v| v as f64 + 1.0).collect()).unwrap();
        let avail: Vec<bool> = (0..100).map(|i| i % 10 != 3).collect();
        let r = impute_zeros(&f, &avail).unwrap();
        let zero_rows = (0..100).filter(|&i| r.features.row_is_zero(i)).count();
        let untouched = (0..100).filter(|&i| r.features.row(i) == f.row(i)).count();
        assert_eq!((zero_rows, untouched), (10, 90));
    }

    #[test]
    fn mean_of_two_rows() {
        let f = m(&[&[1., 3.], &[3., 1.], &[9., 9.]]);
        let r = impute_global_mean(&f, &[true, true, false]).unwrap();
        assert_eq!(r.features.row(2), &[2., 2.]);
    }

    #[test]
    fn mean_of_single_row() {
        let f = m(&[&[7., -1.], &[0., 0.], &[0., 0.]]);
        let r = impute_global_mean(&f, &[true, false, false]).unwrap();
        assert_eq!(r.features.row(1), &[7., -1.]);
        assert_eq!(r.features.row(2), &[7., -1.]);
        assert!(matches!(
            impute_global_mean(&f, &[false; 3]),
            Err(Error::MissingEverything)
        ));
    }

    #[test]
    fn random_is_seeded_and_in_range() {
        let f = m(&[&[0., 1.], &[0.5, 0.25], &[9., 9.], &[9., 9.]]);
        let avail = [true, true, false, false];
        let a = impute_random(&f, &avail, 7).unwrap();
        let b = impute_random(&f, &avail, 7).unwrap();
        assert_eq!(a.features, b.features);
        assert!(a
            .features
            .as_slice()
            .iter()
            .all(|v| (0.0..=1.0).contains(v)));
        assert!(matches!(
            impute_random(&f, &[false; 4], 1),
            Err(Error::MissingEverything)
        ));
    }

    #[test]
    fn random_sample_mean() {
        let mut rows = vec![vec![0.0; 10], vec![1.0; 10]];
        rows.extend((0..100).map(|_| vec![5.0; 10]));
        let f = FeatureMatrix::from_rows(&rows).unwrap();
        let avail: Vec<bool> = (0..102).map(|i| i < 2).collect();
        let r = impute_random(&f, &avail, 99).unwrap();
        let vals: Vec<f64> = (2..102).flat_map(|i| r.features.row(i).to_vec()).collect();
        assert_eq!(vals.len(), 1000);
        let mean = vals.iter().sum::<f64>() / 1000.0;
        assert!((0.45..=0.55).contains(&mean), "{mean}");
    }
}
