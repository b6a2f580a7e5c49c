//! Semantic pose reward: embeds the instruction once, embeds each visited
//! pose through the trained mapper, and scores their cosine similarity.
//! Backends: a hosted embedding service over HTTP, or an offline mock whose
//! instruction embeddings are pinned to anchor poses.

mod cosine;
mod http;
mod instruction;
mod mock;
mod reward;

pub use cosine::cosine;
pub use http::{
    HttpEmbedClient, DEFAULT_BACKOFF, DEFAULT_TIMEOUT, KEY_ENV_VAR, TRANSPORT_ATTEMPTS,
};
pub use instruction::{AnchorTask, EmbedClient, Instruction};
pub use mock::MockVlm;
pub use reward::r_v;

#[derive(Debug, thiserror::Error)]
pub enum VlmError {
    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("instruction text is empty")]
    EmptyText,
    #[error("anchor pose is invalid: {0}")]
    BadAnchor(String),
    #[error("{} is not set", KEY_ENV_VAR)]
    MissingKey,
    #[error("transport failure after {attempts} attempts: {last}")]
    Transport { attempts: usize, last: String },
    #[error("malformed embedding response: {0}")]
    BadResponse(String),
    #[error(transparent)]
    Mapper(#[from] grove_mapper::MapperError),
}
