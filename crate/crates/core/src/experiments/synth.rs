use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AvailabilityMask, FeatureMatrix, InteractionMatrix};
use crate::scalar::Scalar;

/// Parameters of a clustered dataset with tunable feature homophily.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub num_items: usize,
    pub num_users: usize,
    pub dim: usize,
    pub clusters: usize,
    /// In `[0, 1]`: weight of the cluster centroid in item features and the
    /// probability that a user interaction stays inside the home cluster.
    pub homophily: f64,
    /// Expected norm of the per-item noise vector.
    pub noise_scale: f64,
    pub interactions_per_user: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            num_items: 200,
            num_users: 400,
            dim: 32,
            clusters: 5,
            homophily: 0.8,
            noise_scale: 1.0,
            interactions_per_user: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthDataset<T> {
    pub interactions: InteractionMatrix,
    pub features: FeatureMatrix<T>,
    pub mask: AvailabilityMask,
    /// Cluster of each item (`item % clusters`).
    pub clusters: Vec<usize>,
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Generates one modality of clustered features and a user log whose
/// co-interactions concentrate inside clusters as `homophily` grows.
pub fn synth_generate<T: Scalar>(spec: &SynthSpec) -> Result<SynthDataset<T>> {
    if spec.clusters == 0 {
        return Err(Error::InvalidConfig("clusters must be >= 1".into()));
    }
    if spec.dim < spec.clusters {
        return Err(Error::InvalidConfig(format!(
            "dim {} < clusters {}: centroids cannot be near-orthogonal",
            spec.dim, spec.clusters
        )));
    }
    if !(0.0..=1.0).contains(&spec.homophily) {
        return Err(Error::InvalidConfig(format!(
            "homophily must lie in [0, 1], got {}",
            spec.homophily
        )));
    }
    if spec.num_items == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gaussian = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..spec.dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect()
    };

    let centroids: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| {
            let mut c = gaussian(&mut rng);
            normalize(&mut c);
            c
        })
        .collect();

    let rho = spec.homophily;
    let noise = (1.0 - rho) * spec.noise_scale / (spec.dim as f64).sqrt();
    let clusters: Vec<usize> = (0..spec.num_items).map(|i| i % spec.clusters).collect();
    let mut values = Vec::with_capacity(spec.num_items * spec.dim);
    for &c in &clusters {
        let g = gaussian(&mut rng);
        let mut v: Vec<f64> = centroids[c]
            .iter()
            .zip(&g)
            .map(|(m, z)| rho * m + noise * z)
            .collect();
        normalize(&mut v);
        values.extend(v.into_iter().map(T::of));
    }
    let features = FeatureMatrix::new(spec.num_items, spec.dim, values)?;

    let members: Vec<Vec<usize>> = (0..spec.clusters)
        .map(|c| (0..spec.num_items).filter(|&i| clusters[i] == c).collect())
        .collect();
    let mut pairs = Vec::with_capacity(spec.num_users * spec.interactions_per_user);
    for u in 0..spec.num_users {
        let home = rng.random_range(0..spec.clusters);
        for _ in 0..spec.interactions_per_user {
            let item = if rng.random_bool(rho) && !members[home].is_empty() {
                members[home][rng.random_range(0..members[home].len())]
            } else {
                rng.random_range(0..spec.num_items)
            };
            pairs.push((u, item));
        }
    }
    let interactions = InteractionMatrix::from_pairs(spec.num_users, spec.num_items, pairs)?;
    Ok(SynthDataset {
        interactions,
        features,
        mask: AvailabilityMask::all_available(spec.num_items, 1),
        clusters,
    })
}
