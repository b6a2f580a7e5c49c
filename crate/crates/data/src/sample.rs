use crate::{ClusterIndex, PoseDataset};
use grove_env::PoseVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-stage cluster-balanced sampling: each draw picks a cluster uniformly
/// from the nonempty clusters, then a pose uniformly within it. Draws are
/// independent, so rare clusters appear as often as crowded ones.
pub fn balanced_sample(
    index: &ClusterIndex,
    dataset: &PoseDataset,
    batch_size: usize,
    seed: u64,
) -> Vec<PoseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    balanced_sample_with_rng(index, dataset, batch_size, &mut rng)
}

pub fn balanced_sample_with_rng(
    index: &ClusterIndex,
    dataset: &PoseDataset,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<PoseVector> {
    assert_eq!(
        index.assignment.len(),
        dataset.len(),
        "cluster index was built over a different dataset"
    );
    balanced_sample_indices(index, batch_size, rng)
        .into_iter()
        .map(|i| dataset.poses[i].clone())
        .collect()
}

/// Indices instead of cloned poses, for callers that also need oracle targets.
pub fn balanced_sample_indices(
    index: &ClusterIndex,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let members: Vec<Vec<usize>> = index
        .members()
        .into_iter()
        .filter(|m| !m.is_empty())
        .collect();
    balanced_sample_from_members(&members, batch_size, rng)
}

/// Core two-stage draw over an explicit cluster-membership list, so callers
/// can sample from a subset of clusters (for example a train split).
pub fn balanced_sample_from_members(
    members: &[Vec<usize>],
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    assert!(
        members.iter().any(|m| !m.is_empty()),
        "no nonempty clusters to sample from"
    );
    let nonempty: Vec<&Vec<usize>> = members.iter().filter(|m| !m.is_empty()).collect();
    let mut batch = Vec::with_capacity(batch_size);
    for _ in 0..batch_size {
        let cluster = nonempty[rng.gen_range(0..nonempty.len())];
        batch.push(cluster[rng.gen_range(0..cluster.len())]);
    }
    batch
}
