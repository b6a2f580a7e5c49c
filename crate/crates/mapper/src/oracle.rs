use crate::{MapperError, PoseEmbedder};
use grove_env::PoseVector;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const NUM_VIEWS: usize = 5;
const BIAS_SIGMA: f64 = 0.01;

/// Deterministic stand-in for the render-and-CLIP ground-truth pipeline:
/// five fixed random "view" projections of the sin/cos-lifted pose, each
/// squashed, unit-normalized, mean-pooled, and re-normalized.
pub struct SyntheticOracle {
    pub num_joints: usize,
    pub dims: usize,
    pub seed: u64,
    views: Vec<(Array2<f64>, Array1<f64>)>,
}

impl SyntheticOracle {
    pub fn new(num_joints: usize, dims: usize, seed: u64) -> SyntheticOracle {
        let feat = 6 * num_joints;
        let w_sigma = 1.0 / (feat as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let views = (0..NUM_VIEWS)
            .map(|_| {
                let w = Array2::from_shape_fn((dims, feat), |_| {
                    let z: f64 = rng.sample(StandardNormal);
                    w_sigma * z
                });
                let b = Array1::from_shape_fn(dims, |_| {
                    let z: f64 = rng.sample(StandardNormal);
                    BIAS_SIGMA * z
                });
                (w, b)
            })
            .collect();
        SyntheticOracle {
            num_joints,
            dims,
            seed,
            views,
        }
    }

    /// sin/cos feature lift: [sin of every angle, cos of every angle].
    fn features(&self, pose: &PoseVector) -> Array1<f64> {
        let flat = pose.flat();
        let mut f = Vec::with_capacity(2 * flat.len());
        f.extend(flat.iter().map(|a| a.sin()));
        f.extend(flat.iter().map(|a| a.cos()));
        Array1::from_vec(f)
    }

    pub fn embed(&self, pose: &PoseVector) -> Result<Vec<f64>, MapperError> {
        if pose.num_joints() != self.num_joints {
            return Err(MapperError::DimMismatch {
                expected: self.num_joints,
                got: pose.num_joints(),
            });
        }
        let f = self.features(pose);
        let mut pooled = Array1::<f64>::zeros(self.dims);
        for (w, b) in &self.views {
            let mut u = w.dot(&f) + b;
            u.mapv_inplace(f64::tanh);
            let norm = u.dot(&u).sqrt();
            debug_assert!(norm > 0.0, "degenerate view projection");
            pooled = pooled + u / norm;
        }
        pooled /= NUM_VIEWS as f64;
        let norm = pooled.dot(&pooled).sqrt();
        debug_assert!(norm > 0.0, "views cancelled exactly");
        Ok((pooled / norm).to_vec())
    }
}

impl PoseEmbedder for SyntheticOracle {
    fn embed_pose(&self, pose: &PoseVector) -> Result<Vec<f64>, MapperError> {
        self.embed(pose)
    }

    fn dims(&self) -> usize {
        self.dims
    }
}

/// Convenience wrapper at the default CLIP-like width (D = 512, J from pose).
pub fn oracle_embed(pose: &PoseVector, oracle_seed: u64) -> Vec<f64> {
    SyntheticOracle::new(pose.num_joints(), 512, oracle_seed)
        .embed(pose)
        .expect("joint count taken from the pose itself")
}
