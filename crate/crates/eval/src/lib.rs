//! Quantitative run metrics: reward distance against an expert cap,
//! column-normalized similarity matrices, trajectory smoothness, and
//! trajectory-level semantic similarity.
//!
//! Everything here is a pure function over already-collected data; nothing
//! steps an environment or talks to a client.

mod curve;
mod matrix;
mod semantic;
mod smooth;

pub use curve::{task_cap, ExpertCurve};
pub use matrix::{matrix_similarity, SimilarityMatrix};
pub use semantic::semantic_score;
pub use smooth::smoothness;

use grove_mapper::MapperError;
use grove_vlm::VlmError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("expert curve is empty")]
    EmptyCurve,
    #[error("curve cap must be finite")]
    BadCap,
    #[error("curve iterations must be strictly increasing at index {index}")]
    IterationOrder { index: usize },
    #[error("curve value {value} at index {index} exceeds cap {cap}")]
    AboveCap { index: usize, value: f64, cap: f64 },
    #[error("non-finite curve value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix row {row} has {got} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("matrix shapes differ: {a:?} vs {b:?}")]
    ShapeMismatch {
        a: (usize, usize),
        b: (usize, usize),
    },
    #[error("smoothness needs at least 4 frames, got {got}")]
    ShortTrajectory { got: usize },
    #[error("frame {frame} has {got} joints, expected {expected}")]
    JointCountMismatch {
        frame: usize,
        expected: usize,
        got: usize,
    },
    #[error("frames carry no joints")]
    NoJoints,
    #[error("dt must be positive and finite")]
    BadDt,
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error(transparent)]
    Vlm(#[from] VlmError),
    #[error(transparent)]
    Mapper(#[from] MapperError),
}
