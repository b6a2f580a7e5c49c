use crate::instruction::EmbedClient;
use crate::VlmError;
use serde::{Deserialize, Serialize};
use std::time::Duration;

pub const KEY_ENV_VAR: &str = "GROVE_VLM_KEY";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_BACKOFF: Duration = Duration::from_secs(1);
/// Transport attempts per embedding call (1 original + 2 retries).
pub const TRANSPORT_ATTEMPTS: usize = 3;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    data: Vec<EmbedItem>,
}

#[derive(Deserialize)]
struct EmbedItem {
    embedding: Vec<f64>,
}

/// Blocking embeddings client with the same retry discipline as the chat
/// client: transport failures back off exponentially, malformed success
/// bodies fail immediately. A failure that survives the retries is returned
/// as an error; callers treat the text embedding as a hard dependency and
/// abort the run.
pub struct HttpEmbedClient {
    endpoint: String,
    model: String,
    api_key: String,
    backoff_base: Duration,
    http: reqwest::blocking::Client,
}

impl HttpEmbedClient {
    /// Reads the API key from `GROVE_VLM_KEY`.
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Result<Self, VlmError> {
        let key = std::env::var(KEY_ENV_VAR).map_err(|_| VlmError::MissingKey)?;
        Ok(Self::with_key(endpoint, model, key))
    }

    pub fn with_key(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: impl Into<String>,
    ) -> Self {
        HttpEmbedClient {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: api_key.into(),
            backoff_base: DEFAULT_BACKOFF,
            http: build_http(DEFAULT_TIMEOUT),
        }
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.http = build_http(timeout);
        self
    }

    pub fn backoff_base(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    fn try_once(&self, request: &EmbedRequest) -> Result<Vec<f64>, Attempt> {
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
        let parsed: EmbedResponse = response
            .json()
            .map_err(|e| Attempt::Fatal(VlmError::BadResponse(e.to_string())))?;
        let item = parsed
            .data
            .into_iter()
            .next()
            .ok_or_else(|| Attempt::Fatal(VlmError::BadResponse("empty data".to_string())))?;
        Ok(item.embedding)
    }
}

enum Attempt {
    Retry(String),
    Fatal(VlmError),
}

fn build_http(timeout: Duration) -> reqwest::blocking::Client {
    reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .expect("reqwest client construction cannot fail with these options")
}

impl EmbedClient for HttpEmbedClient {
    fn embed_text(&self, text: &str) -> Result<Vec<f64>, VlmError> {
        let request = EmbedRequest {
            model: &self.model,
            input: text,
        };
        let mut last = String::new();
        for attempt in 0..TRANSPORT_ATTEMPTS {
            if attempt > 0 {
                std::thread::sleep(self.backoff_base * (1 << (attempt - 1)));
            }
            match self.try_once(&request) {
                Ok(embedding) => return Ok(embedding),
                Err(Attempt::Retry(msg)) => last = msg,
                Err(Attempt::Fatal(err)) => return Err(err),
            }
        }
        Err(VlmError::Transport {
            attempts: TRANSPORT_ATTEMPTS,
            last,
        })
    }
}
