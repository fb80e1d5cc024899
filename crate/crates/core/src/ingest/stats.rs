use serde::Serialize;

use super::{AvailabilityMask, InteractionMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub num_users: usize,
    pub num_items: usize,
    pub num_interactions: usize,
    pub missing_per_modality: Vec<usize>,
    /// Items missing at least one modality, as an integer percentage.
    pub total_missing_pct: u32,
}

pub fn dataset_stats(r: &InteractionMatrix, mask: &AvailabilityMask) -> Result<DatasetStats> {
    if mask.num_items() != r.num_items() {
        return Err(Error::ShapeMismatch(format!(
            "mask covers {} items, interactions {}",
            mask.num_items(),
            r.num_items()
        )));
    }
    let missing_per_modality = (0..mask.num_modalities())
        .map(|m| mask.missing_count(m))
        .collect();
    let any_missing = (0..mask.num_items())
        .filter(|&i| (0..mask.num_modalities()).any(|m| !mask.is_available(i, m)))
        .count();
    Ok(DatasetStats {
        num_users: r.num_users(),
        num_items: r.num_items(),
        num_interactions: r.num_interactions(),
        missing_per_modality,
        total_missing_pct: percent_half_up(any_missing, r.num_items()),
    })
}

/// `round(100 * part / whole)` with ties rounding up, in exact integer math.
fn percent_half_up(part: usize, whole: usize) -> u32 {
    if whole == 0 {
        return 0;
    }
    let (part, whole) = (part as u128, whole as u128);
    ((200 * part + whole) / (2 * whole)) as u32
}
