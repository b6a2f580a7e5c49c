use crate::instruction::{AnchorTask, EmbedClient};
use crate::VlmError;
use grove_mapper::{PoseEmbedder, SyntheticOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use std::collections::HashMap;

/// Offline stand-in for the hosted embedding service. Registered instructions
/// embed to the synthetic-oracle embedding of their anchor pose, so the
/// anchor is the exact optimum of the semantic reward. Anything else embeds
/// to a unit vector seeded by a hash of the text: deterministic, and nearly
/// orthogonal to everything with overwhelming probability.
#[derive(Clone, Debug)]
pub struct MockVlm {
    dims: usize,
    oracle_seed: u64,
    anchors: HashMap<String, AnchorTask>,
}

impl MockVlm {
    pub fn new(dims: usize, oracle_seed: u64) -> MockVlm {
        assert!(dims > 0);
        MockVlm {
            dims,
            oracle_seed,
            anchors: HashMap::new(),
        }
    }

    /// Mock aligned with a trained mapper: same embedding width, same oracle
    /// seed, so anchor embeddings live in the space the mapper was fit to.
    pub fn for_mapper(model: &grove_mapper::MapperModel) -> MockVlm {
        MockVlm::new(model.dims, model.oracle_seed)
    }

    pub fn with_anchor(mut self, task: AnchorTask) -> MockVlm {
        self.anchors.insert(task.instruction.clone(), task);
        self
    }

    pub fn anchor_for(&self, instruction: &str) -> Option<&AnchorTask> {
        self.anchors.get(instruction)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn oracle_seed(&self) -> u64 {
        self.oracle_seed
    }
}

impl EmbedClient for MockVlm {
    fn embed_text(&self, text: &str) -> Result<Vec<f64>, VlmError> {
        match self.anchors.get(text) {
            Some(task) => {
                let oracle =
                    SyntheticOracle::new(task.anchor.num_joints(), self.dims, self.oracle_seed);
                Ok(oracle.embed_pose(&task.anchor)?)
            }
            None => Ok(hashed_unit_vector(text, self.dims)),
        }
    }
}

/// Deterministic unit vector from the text alone: SHA-256 of the text seeds
/// a generator, gaussian samples are normalized onto the sphere.
fn hashed_unit_vector(text: &str, dims: usize) -> Vec<f64> {
    let digest = Sha256::digest(text.as_bytes());
    let seed = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dims)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}
