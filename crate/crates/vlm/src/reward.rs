use crate::cosine::cosine;
use crate::instruction::Instruction;
use crate::VlmError;
use grove_env::{pose_of, EnvState};
use grove_mapper::PoseEmbedder;

/// Semantic reward: cosine similarity between the instruction's cached text
/// embedding and the pose embedding of the current state. Raw cosine is
/// passed through unclamped on the negative side by design; no rectification
/// is applied.
pub fn r_v(
    state: &EnvState,
    instruction: &Instruction,
    embedder: &dyn PoseEmbedder,
) -> Result<f64, VlmError> {
    if instruction.embedding().len() != embedder.dims() {
        return Err(VlmError::DimMismatch {
            expected: embedder.dims(),
            got: instruction.embedding().len(),
        });
    }
    let pose = pose_of(state);
    let pose_embedding = embedder.embed_pose(&pose)?;
    cosine(instruction.embedding(), &pose_embedding)
}
