use crate::{ChatClient, LlmError, Message};
use serde::{Deserialize, Serialize};
use std::time::Duration;

pub const KEY_ENV_VAR: &str = "GROVE_LLM_KEY";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_TEMPERATURE: f64 = 0.2;
pub const DEFAULT_BACKOFF: Duration = Duration::from_secs(1);
/// Transport attempts per completion call (1 original + 2 retries).
pub const TRANSPORT_ATTEMPTS: usize = 3;

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: String,
}

/// Blocking chat-completions client. Transport failures (connection errors,
/// non-success statuses) are retried with exponential backoff; a response
/// that comes back 200 but does not deserialize is not retried.
pub struct HttpChatClient {
    endpoint: String,
    model: String,
    api_key: String,
    temperature: f64,
    backoff_base: Duration,
    http: reqwest::blocking::Client,
}

impl HttpChatClient {
    /// Reads the API key from `GROVE_LLM_KEY`.
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Result<Self, LlmError> {
        let key = std::env::var(KEY_ENV_VAR).map_err(|_| LlmError::MissingKey)?;
        Ok(Self::with_key(endpoint, model, key))
    }

    pub fn with_key(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: impl Into<String>,
    ) -> Self {
        HttpChatClient {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: api_key.into(),
            temperature: DEFAULT_TEMPERATURE,
            backoff_base: DEFAULT_BACKOFF,
            http: build_http(DEFAULT_TIMEOUT),
        }
    }

    pub fn temperature(mut self, temperature: f64) -> Self {
        assert!(temperature.is_finite() && temperature >= 0.0);
        self.temperature = temperature;
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.http = build_http(timeout);
        self
    }

    /// First backoff interval; doubles on each further retry. Tests inject a
    /// short base so the retry path runs in milliseconds.
    pub fn backoff_base(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    fn try_once(&self, request: &ChatRequest) -> Result<String, Attempt> {
        let response = self
            .http
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(request)
            .send()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(Attempt::Retry(format!("status {status}")));
        }
        let parsed: ChatResponse = response
            .json()
            .map_err(|e| Attempt::Fatal(LlmError::BadResponse(e.to_string())))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| Attempt::Fatal(LlmError::BadResponse("empty choices".to_string())))?;
        Ok(choice.message.content)
    }
}

enum Attempt {
    Retry(String),
    Fatal(LlmError),
}

fn build_http(timeout: Duration) -> reqwest::blocking::Client {
    reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .expect("reqwest client construction cannot fail with these options")
}

impl ChatClient for HttpChatClient {
    fn complete(&self, messages: &[Message]) -> Result<String, LlmError> {
        let request = ChatRequest {
            model: &self.model,
            messages,
            temperature: self.temperature,
        };
        let mut last = String::new();
        for attempt in 0..TRANSPORT_ATTEMPTS {
            if attempt > 0 {
                std::thread::sleep(self.backoff_base * (1 << (attempt - 1)));
            }
            match self.try_once(&request) {
                Ok(text) => return Ok(text),
                Err(Attempt::Retry(msg)) => last = msg,
                Err(Attempt::Fatal(err)) => return Err(err),
            }
        }
        Err(LlmError::Transport {
            attempts: TRANSPORT_ATTEMPTS,
            last,
        })
    }
}
