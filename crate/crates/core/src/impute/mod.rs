//! The three-step imputation protocol: stash the available rows and zero the
//! missing ones, run a method, then restore the stashed rows.

mod baselines;
mod config;
mod dense;
mod diffusion;

pub use baselines::{global_mean, impute_global_mean, impute_random, impute_zeros};
pub use config::{Fallback, ImputationConfig, Method};
pub use diffusion::{
    heat_kernel, ppr_neumann, step_heat, step_multihop, step_neigh_mean, step_pers_pagerank,
};

use crate::error::{Error, Result};
use crate::graph::{row_normalize, sym_normalize, SparsifiedAdjacency};
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationResult<T> {
    /// Complete matrix; available rows are bitwise equal to the input.
    pub features: FeatureMatrix<T>,
    /// Rows that were missing, ascending.
    pub imputed_rows: Vec<usize>,
    pub iterations_run: usize,
    /// Isolated missing rows filled by the fallback policy.
    pub fallback_rows: Vec<usize>,
}

/// Imputes the missing rows of one modality.
///
/// Missing rows may hold any values (including NaN) on input; they are never
/// read. Available rows must be finite.
pub fn impute<T: Scalar>(
    f: &FeatureMatrix<T>,
    available: &[bool],
    adjacency: &SparsifiedAdjacency,
    cfg: &ImputationConfig,
) -> Result<ImputationResult<T>> {
    cfg.validate()?;
    if available.len() != f.rows() {
        return Err(Error::ShapeMismatch(format!(
            "mask of {} items for {} feature rows",
            available.len(),
            f.rows()
        )));
    }
    if cfg.method.uses_graph() && adjacency.num_items() != f.rows() {
        return Err(Error::ShapeMismatch(format!(
            "graph over {} items for {} feature rows",
            adjacency.num_items(),
            f.rows()
        )));
    }
    if let Some(i) =
        (0..f.rows()).find(|&i| available[i] && !f.row(i).iter().all(|v| v.is_finite()))
    {
        return Err(Error::Format(format!(
            "available row {i} holds non-finite values"
        )));
    }
    let any_available = available.iter().any(|&a| a);
    let any_missing = available.iter().any(|&a| !a);
    if !any_missing {
        return Ok(ImputationResult {
            features: f.clone(),
            imputed_rows: Vec::new(),
            iterations_run: 0,
            fallback_rows: Vec::new(),
        });
    }
    if !any_available && cfg.method != Method::Zeros {
        return Err(Error::MissingEverything);
    }

    let placeholder = f;
    let mut x = f.clone();
    for (i, _) in available.iter().enumerate().filter(|(_, &a)| !a) {
        x.row_mut(i).iter_mut().for_each(|v| *v = T::zero());
    }

    let (mut features, iterations_run, degrees) = match cfg.method {
        Method::Zeros => return impute_zeros(&x, available),
        Method::Random => return impute_random(&x, available, cfg.seed),
        Method::GlobalMean => return impute_global_mean(&x, available),
        Method::NeighMean => {
            let p = row_normalize::<T>(adjacency);
            let out = step_neigh_mean(&x, &p)?;
            if !out.is_finite() {
                return Err(Error::NumericalInstability {
                    method: "neigh-mean",
                    iteration: 1,
                    hint: "propagation produced non-finite values".into(),
                });
            }
            (out, 1, p.row_degrees().to_vec())
        }
        Method::MultiHop => {
            let p = sym_normalize::<T>(adjacency);
            let (out, t) = step_multihop(x, &p, placeholder, available, cfg.hops, cfg.tolerance)?;
            (out, t, p.row_degrees().to_vec())
        }
        Method::PersPageRank => {
            let p = sym_normalize::<T>(adjacency);
            let (out, t) = step_pers_pagerank(
                x,
                &p,
                placeholder,
                available,
                cfg.alpha,
                cfg.hops,
                cfg.series_order,
                cfg.dense_solve_threshold,
                cfg.tolerance,
            )?;
            (out, t, p.row_degrees().to_vec())
        }
        Method::Heat => {
            let p = sym_normalize::<T>(adjacency);
            let (out, t) = step_heat(
                x,
                &p,
                placeholder,
                available,
                cfg.diffusion_time,
                cfg.hops,
                cfg.series_order,
                cfg.tolerance,
            )?;
            (out, t, p.row_degrees().to_vec())
        }
    };

    for (i, _) in available.iter().enumerate().filter(|(_, &a)| a) {
        features.row_mut(i).copy_from_slice(placeholder.row(i));
    }

    let fallback_rows: Vec<usize> = (0..f.rows())
        .filter(|&i| !available[i] && degrees[i] == 0)
        .collect();
    if !fallback_rows.is_empty() {
        let fill = match cfg.fallback {
            Fallback::GlobalMean => global_mean(placeholder, available)?,
            Fallback::Zeros => vec![T::zero(); f.cols()],
        };
        for &i in &fallback_rows {
            features.row_mut(i).copy_from_slice(&fill);
        }
    }

    Ok(ImputationResult {
        features,
        imputed_rows: (0..f.rows()).filter(|&i| !available[i]).collect(),
        iterations_run,
        fallback_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SparsifiedAdjacency {
        SparsifiedAdjacency::from_undirected_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn neigh_mean_on_path() {
        let f = FeatureMatrix::new(3, 2, vec![1.0, 0.0, f64::NAN, f64::NAN, 0.0, 1.0]).unwrap();
        let r = impute(
            &f,
            &[true, false, true],
            &path3(),
            &ImputationConfig::new(Method::NeighMean),
        )
        .unwrap();
        assert_eq!(r.features.row(1), &[0.5, 0.5]);
        assert_eq!(r.imputed_rows, vec![1]);
        assert!(r.fallback_rows.is_empty());
    }

    #[test]
    fn nothing_missing_is_identity() {
        let f = FeatureMatrix::new(3, 1, vec![1.0f64, -0.0, 3.0]).unwrap();
        for m in Method::ALL {
            let r = impute(&f, &[true; 3], &path3(), &ImputationConfig::new(m)).unwrap();
            assert_eq!(r.features.as_slice()[1].to_bits(), (-0.0f64).to_bits());
            assert!(r.imputed_rows.is_empty());
        }
    }

    #[test]
    fn all_missing() {
        let f = FeatureMatrix::<f64>::zeros(3, 2);
        for m in Method::ALL.into_iter().filter(|&m| m != Method::Zeros) {
            assert!(matches!(
                impute(&f, &[false; 3], &path3(), &ImputationConfig::new(m)),
                Err(Error::MissingEverything)
            ));
        }
        assert!(impute(
            &f,
            &[false; 3],
            &path3(),
            &ImputationConfig::new(Method::Zeros)
        )
        .is_ok());
    }

    #[test]
    fn isolated_item_gets_fallback() {
        // items 0-1 linked, item 2 isolated and missing
        let a = SparsifiedAdjacency::from_undirected_edges(3, &[(0, 1)]).unwrap();
        let f = FeatureMatrix::new(3, 2, vec![2.0, 0.0, 0.0, 4.0, 0.0, 0.0]).unwrap();
        let avail = [true, true, false];
        for m in [
            Method::NeighMean,
            Method::MultiHop,
            Method::PersPageRank,
            Method::Heat,
        ] {
            let r = impute(&f, &avail, &a, &ImputationConfig::new(m)).unwrap();
            assert_eq!(r.fallback_rows, vec![2]);
            assert_eq!(r.features.row(2), &[1.0, 2.0], "{m}");
            let mut cfg = ImputationConfig::new(m);
            cfg.fallback = Fallback::Zeros;
            let r = impute(&f, &avail, &a, &cfg).unwrap();
            assert_eq!(r.features.row(2), &[0.0, 0.0]);
        }
    }

    #[test]
    fn rejects_nonfinite_available_rows() {
        let f = FeatureMatrix::new(3, 1, vec![f64::NAN, 1.0, 2.0]).unwrap();
        let cfg = ImputationConfig::new(Method::GlobalMean);
        assert!(impute(&f, &[true, false, true], &path3(), &cfg).is_err());
    }

    #[test]
    fn graph_shape_checked() {
        let f = FeatureMatrix::<f64>::zeros(4, 1);
        let cfg = ImputationConfig::new(Method::Heat);
        assert!(matches!(
            impute(&f, &[true, false, true, true], &path3(), &cfg),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
