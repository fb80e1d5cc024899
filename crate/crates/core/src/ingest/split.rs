use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::InteractionMatrix;
use crate::error::{Error, Result};

/// Per-user hold-out split. Each user keeps `ceil(ratio * degree)` of their
/// interactions in train, chosen uniformly without replacement.
pub fn holdout_split(
    r: &InteractionMatrix,
    ratio: f64,
    seed: u64,
) -> Result<(InteractionMatrix, InteractionMatrix)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for u in 0..r.num_users() {
        let mut items = r.user_items(u).to_vec();
        items.shuffle(&mut rng);
        let keep = ((ratio * items.len() as f64).ceil() as usize).min(items.len());
        train.extend(items[..keep].iter().map(|&i| (u, i)));
        test.extend(items[keep..].iter().map(|&i| (u, i)));
    }
    Ok((
        InteractionMatrix::from_pairs(r.num_users(), r.num_items(), train)?,
        InteractionMatrix::from_pairs(r.num_users(), r.num_items(), test)?,
    ))
}
