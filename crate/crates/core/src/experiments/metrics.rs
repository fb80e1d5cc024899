use serde::Serialize;

use crate::error::{Error, Result};
use crate::homophily::cosine;
use crate::impute::ImputationResult;
use crate::ingest::FeatureMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionMetrics {
    pub mean_cosine: f64,
    pub mean_squared_error: f64,
    pub cosine_min: f64,
    pub cosine_median: f64,
    pub cosine_max: f64,
    pub n_scored: usize,
}

/// Compares imputed rows against ground truth on the artificially hidden rows.
/// A row with zero norm on either side scores cosine 0.
pub fn score_reconstruction<T: Scalar>(
    imputed: &ImputationResult<T>,
    truth: &FeatureMatrix<T>,
    artificially_masked: &[usize],
) -> Result<ReconstructionMetrics> {
    if artificially_masked.is_empty() {
        return Err(Error::InvalidConfig("no masked rows to score".into()));
    }
    let got = &imputed.features;
    if got.rows() != truth.rows() || got.cols() != truth.cols() {
        return Err(Error::ShapeMismatch(format!(
            "imputed {}x{} vs truth {}x{}",
            got.rows(),
            got.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    if let Some(&i) = artificially_masked.iter().find(|&&i| i >= truth.rows()) {
        return Err(Error::Range {
            index: i,
            limit: truth.rows(),
        });
    }
    let mut cosines = Vec::with_capacity(artificially_masked.len());
    let mut sq = 0.0f64;
    for &i in artificially_masked {
        cosines.push(cosine(got.row(i), truth.row(i)).unwrap_or(0.0));
        sq += got
            .row(i)
            .iter()
            .zip(truth.row(i))
            .map(|(&a, &b)| (a.as_f64() - b.as_f64()).powi(2))
            .sum::<f64>();
    }
    let n = cosines.len();
    let mean_cosine = cosines.iter().sum::<f64>() / n as f64;
    let mut sorted = cosines;
    sorted.sort_by(f64::total_cmp);
    let cosine_median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(ReconstructionMetrics {
        mean_cosine,
        mean_squared_error: sq / (n * got.cols().max(1)) as f64,
        cosine_min: sorted[0],
        cosine_median,
        cosine_max: sorted[n - 1],
        n_scored: n,
    })
}
