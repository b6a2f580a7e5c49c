//! Pose2CLIP surrogate: the pose-to-embedding MLP, its trainer, and the
//! synthetic rendering oracle that supplies regression targets.

mod model;
mod oracle;
mod train;

pub use model::{mapper_dims, MapperModel};
pub use oracle::{oracle_embed, SyntheticOracle};
pub use train::{loss_gradients, mse_loss, train_mapper, EpochMetrics, TrainConfig, TrainMetrics};

use grove_env::PoseVector;

/// Anything that turns a pose into a D-dimensional embedding: the trained
/// mapper for production, the synthetic oracle for tests and mocks.
pub trait PoseEmbedder {
    fn embed_pose(&self, pose: &PoseVector) -> Result<Vec<f64>, MapperError>;
    fn dims(&self) -> usize;
}

#[derive(Debug, thiserror::Error)]
pub enum MapperError {
    #[error("pose has {got} joints, model expects {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("training diverged: loss is not finite at step {step}")]
    Diverged { step: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("checkpoint is not valid: {0}")]
    BadCheckpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
