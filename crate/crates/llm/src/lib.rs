//! Reward generation via a chat model: prompt assembly, code-block
//! extraction, and a parse/validate retry loop with a degraded fallback.
//! An offline mock backend stands in for the hosted model in tests and
//! reproducible runs.

mod client;
mod extract;
mod generate;
mod http;
mod mock;
mod prompt;

pub use client::{ChatClient, Message};
pub use extract::extract_block;
pub use generate::{generate_reward, GenerationResult, DEFAULT_MAX_RETRIES, FALLBACK_SOURCE};
pub use http::{
    HttpChatClient, DEFAULT_BACKOFF, DEFAULT_TEMPERATURE, DEFAULT_TIMEOUT, KEY_ENV_VAR,
    TRANSPORT_ATTEMPTS,
};
pub use mock::{MockLlm, BOXING_PROGRAM, TASK_MARKER};
pub use prompt::{build_prompt, example_template, AgentDescription, PromptBundle};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("{} is not set", KEY_ENV_VAR)]
    MissingKey,
    #[error("transport failure after {attempts} attempts: {last}")]
    Transport { attempts: usize, last: String },
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("malformed completion request: {0}")]
    BadRequest(String),
}
