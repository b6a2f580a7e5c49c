use crate::{PoseDataset, SourceTag};
use grove_env::PoseVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

const MODE_SIGMA: f64 = 0.1;

/// Synthetic humanoid pose corpus (15 joints).
pub fn synth_corpus(n: usize, modes: usize, seed: u64) -> PoseDataset {
    synth_corpus_with_joints(15, n, modes, seed)
}

/// Mixture of `modes` Gaussian clusters in flattened angle space: mode means
/// drawn uniformly in [-pi/2, pi/2] per dimension, per-mode sigma 0.1 rad,
/// samples clipped to [-pi, pi]. Poses are spread round-robin over modes so
/// every mode is populated.
pub fn synth_corpus_with_joints(num_joints: usize, n: usize, modes: usize, seed: u64) -> PoseDataset {
    assert!(modes >= 1, "need at least one mode");
    assert!(n >= modes, "need n >= modes");
    let dims = 3 * num_joints;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..modes)
        .map(|_| (0..dims).map(|_| rng.gen_range(-PI / 2.0..PI / 2.0)).collect())
        .collect();

    let mut dataset = PoseDataset::new(num_joints);
    for i in 0..n {
        let mean = &means[i % modes];
        let flat: Vec<f64> = mean
            .iter()
            .map(|mu| {
                let z: f64 = rng.sample(StandardNormal);
                (mu + MODE_SIGMA * z).clamp(-PI, PI)
            })
            .collect();
        dataset
            .push(PoseVector::from_flat(&flat), SourceTag::Synthetic)
            .expect("synthetic pose is valid by construction");
    }
    dataset
}
