use crate::LlmError;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Message {
        Message {
            role: "user".to_string(),
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Message {
        Message {
            role: "assistant".to_string(),
            content: content.into(),
        }
    }
}

/// A chat completion backend. `messages` is the whole conversation so far;
/// the return value is the assistant's reply text.
pub trait ChatClient {
    fn complete(&self, messages: &[Message]) -> Result<String, LlmError>;
}

impl<T: ChatClient + ?Sized> ChatClient for &T {
    fn complete(&self, messages: &[Message]) -> Result<String, LlmError> {
        (*self).complete(messages)
    }
}

impl<T: ChatClient + ?Sized> ChatClient for Box<T> {
    fn complete(&self, messages: &[Message]) -> Result<String, LlmError> {
        (**self).complete(messages)
    }
}
