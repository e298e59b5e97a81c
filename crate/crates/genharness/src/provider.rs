//! Provider configuration and the chat-completion call.
//!
//! ```toml
//! [[provider]]
//! name = "ChatGPT"
//! kind = "openai"
//! endpoint = "https://api.openai.com/v1/chat/completions"
//! model = "gpt-5"
//! token_env = "OPENAI_API_KEY"
//! ```
//!
//! Tokens are only ever read from the named environment variable.

use std::path::Path;
use std::time::Duration;

use lessonlens::retry::RetryPolicy;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApiKind {
    /// `messages` array in, `choices[0].message.content` out, bearer auth.
    #[default]
    Openai,
    /// `x-api-key` auth, required `max_tokens`, `content[].text` out.
    Anthropic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    /// Model id used in file names and the manifest, e.g. `Claude`.
    pub name: String,
    #[serde(default)]
    pub kind: ApiKind,
    pub endpoint: String,
    /// Model name sent to the API.
    pub model: String,
    pub token_env: String,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub max_tokens: Option<u32>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub retry: RetryPolicy,
}

fn default_timeout() -> f64 {
    120.0
}

const ANTHROPIC_VERSION: &str = "2023-06-01";
const ANTHROPIC_DEFAULT_MAX_TOKENS: u32 = 8192;

#[derive(Debug, Deserialize, Serialize)]
pub struct ProvidersFile {
    #[serde(rename = "provider", default)]
    pub providers: Vec<ProviderConfig>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn load_providers(path: &Path) -> Result<Vec<ProviderConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_providers(&text, &path.display().to_string())
}

pub fn parse_providers(text: &str, origin: &str) -> Result<Vec<ProviderConfig>, ConfigError> {
    let file: ProvidersFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.into(),
        message: e.to_string(),
    })?;
    let mut seen = std::collections::HashSet::new();
    for p in &file.providers {
        if p.name.trim().is_empty() || p.name.contains("__") {
            return Err(ConfigError::Invalid(format!("{origin}: invalid provider name `{}`", p.name)));
        }
        if !seen.insert(p.name.as_str()) {
            return Err(ConfigError::Invalid(format!("{origin}: duplicate provider `{}`", p.name)));
        }
        if p.timeout_secs <= 0.0 || !p.timeout_secs.is_finite() {
            return Err(ConfigError::Invalid(format!("{origin}: {}: timeout_secs must be positive", p.name)));
        }
    }
    if file.providers.is_empty() {
        return Err(ConfigError::Invalid(format!("{origin}: no [[provider]] entries")));
    }
    Ok(file.providers)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CallError {
    #[error("environment variable {0} is not set")]
    MissingToken(String),
    #[error("authentication rejected (HTTP {0})")]
    Auth(u16),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl CallError {
    pub fn is_retryable(&self) -> bool {
        match self {
            CallError::Timeout(_) | CallError::Transport(_) => true,
            CallError::Status { status, .. } => *status >= 500 || *status == 429 || *status == 408,
            _ => false,
        }
    }
}

pub fn build_client(config: &ProviderConfig) -> Result<reqwest::blocking::Client, CallError> {
    reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs_f64(config.timeout_secs))
        .build()
        .map_err(|e| CallError::Transport(e.to_string()))
}

pub fn request_body(config: &ProviderConfig, prompt: &str) -> Value {
    let mut body = json!({
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
    });
    if let Some(t) = config.temperature {
        body["temperature"] = json!(t);
    }
    match (config.kind, config.max_tokens) {
        (_, Some(n)) => body["max_tokens"] = json!(n),
        (ApiKind::Anthropic, None) => body["max_tokens"] = json!(ANTHROPIC_DEFAULT_MAX_TOKENS),
        (ApiKind::Openai, None) => {}
    }
    body
}

pub fn response_text(kind: ApiKind, body: &Value) -> Option<String> {
    match kind {
        ApiKind::Openai => body
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string),
        ApiKind::Anthropic => {
            let parts: Vec<&str> = body
                .get("content")?
                .as_array()?
                .iter()
                .filter(|c| c.get("type").and_then(Value::as_str) == Some("text"))
                .filter_map(|c| c.get("text").and_then(Value::as_str))
                .collect();
            (!parts.is_empty()).then(|| parts.concat())
        }
    }
}

/// One chat-completion request with a single user turn.
pub fn complete(client: &reqwest::blocking::Client, config: &ProviderConfig, prompt: &str) -> Result<String, CallError> {
    let token = std::env::var(&config.token_env).map_err(|_| CallError::MissingToken(config.token_env.clone()))?;
    let mut req = client.post(&config.endpoint).json(&request_body(config, prompt));
    req = match config.kind {
        ApiKind::Openai => req.bearer_auth(token),
        ApiKind::Anthropic => req.header("x-api-key", token).header("anthropic-version", ANTHROPIC_VERSION),
    };
    let resp = req.send().map_err(|e| {
        if e.is_timeout() {
            CallError::Timeout(e.to_string())
        } else {
            CallError::Transport(e.to_string())
        }
    })?;
    let status = resp.status().as_u16();
    if status == 401 || status == 403 {
        return Err(CallError::Auth(status));
    }
    let text = resp.text().map_err(|e| {
        if e.is_timeout() {
            CallError::Timeout(e.to_string())
        } else {
            CallError::Transport(e.to_string())
        }
    })?;
    if !(200..300).contains(&status) {
        let body: String = text.chars().take(300).collect();
        return Err(CallError::Status { status, body });
    }
    let body: Value = serde_json::from_str(&text).map_err(|e| CallError::Malformed(e.to_string()))?;
    response_text(config.kind, &body).ok_or_else(|| CallError::Malformed("no message text in response".into()))
}
