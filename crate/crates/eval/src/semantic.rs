use crate::EvalError;
use grove_env::PoseVector;
use grove_mapper::PoseEmbedder;
use grove_vlm::{cosine, Instruction};

/// Trajectory-level semantic similarity: the mean cosine between the
/// instruction's text embedding and each frame's pose embedding, scaled by
/// 100 to match the reporting convention elsewhere.
pub fn semantic_score(
    frames: &[PoseVector],
    instruction: &Instruction,
    embedder: &dyn PoseEmbedder,
) -> Result<f64, EvalError> {
    if frames.is_empty() {
        return Err(EvalError::EmptyTrajectory);
    }
    let mut total = 0.0;
    for pose in frames {
        let embedding = embedder.embed_pose(pose)?;
        total += cosine(instruction.embedding(), &embedding)?;
    }
    Ok(100.0 * total / frames.len() as f64)
}
