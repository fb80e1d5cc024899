use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AvailabilityMask;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingnessSpec {
    /// Share of the catalog to hide per listed modality, in percent.
    pub percentage: u32,
    pub modalities: Vec<usize>,
    pub seed: u64,
    pub repeats: usize,
}

/// A mask with extra rows hidden, plus the rows that were hidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegradedMask {
    pub mask: AvailabilityMask,
    /// `(modality, newly hidden items ascending)` in the order the modalities were listed.
    pub masked: Vec<(usize, Vec<usize>)>,
}

impl DegradedMask {
    pub fn masked_for(&self, modality: usize) -> &[usize] {
        self.masked
            .iter()
            .find(|(m, _)| *m == modality)
            .map_or(&[], |(_, rows)| rows.as_slice())
    }
}

/// Hides `floor(pct * I / 100)` currently-available items per listed modality,
/// once per repeat. Repeat `r` draws from a generator seeded with `seed + r`.
pub fn simulate_missingness(
    mask: &AvailabilityMask,
    spec: &MissingnessSpec,
) -> Result<Vec<DegradedMask>> {
    if spec.percentage > 100 {
        return Err(Error::InvalidConfig(format!(
            "percentage must lie in [0, 100], got {}",
            spec.percentage
        )));
    }
    if spec.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    if let Some(&m) = spec
        .modalities
        .iter()
        .find(|&&m| m >= mask.num_modalities())
    {
        return Err(Error::Range {
            index: m,
            limit: mask.num_modalities(),
        });
    }
    let n = mask.num_items();
    let count = spec.percentage as usize * n / 100;
    (0..spec.repeats)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(r as u64));
            let mut out = mask.clone();
            let mut masked = Vec::with_capacity(spec.modalities.len());
            for &m in &spec.modalities {
                let candidates: Vec<usize> = (0..n).filter(|&i| mask.is_available(i, m)).collect();
                if count > candidates.len() {
                    return Err(Error::InvalidConfig(format!(
                        "cannot hide {count} items of modality {m}: only {} available",
                        candidates.len()
                    )));
                }
                let mut picked: Vec<usize> = sample(&mut rng, candidates.len(), count)
                    .into_iter()
                    .map(|k| candidates[k])
                    .collect();
                picked.sort_unstable();
                for &i in &picked {
                    out.set(i, m, false);
                }
                masked.push((m, picked));
            }
            Ok(DegradedMask { mask: out, masked })
        })
        .collect()
}
