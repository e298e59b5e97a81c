//! Sentence-embedding backends.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::retry::{retry, RetryPolicy};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("embedding request failed after {attempts} attempt(s): {message}; check the endpoint and retry, or raise --retries / --timeout")]
    Request { attempts: u32, message: String },
    #[error("embedding response malformed: {0}")]
    Response(String),
    #[error("embedding model file {path}: {message}")]
    Model { path: String, message: String },
    #[error("backend returned {got} vectors for {expected} texts")]
    Count { expected: usize, got: usize },
    #[error("backend returned a vector of dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

/// A deterministic text-to-vector function.
pub trait EmbeddingBackend<S: Scalar>: Send + Sync {
    fn backend_id(&self) -> String;
    fn dimension(&self) -> usize;
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<S>>, BackendError>;
    /// Whether calls may be issued from several threads at once.
    fn is_concurrent(&self) -> bool {
        true
    }
}

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "all", "also", "am", "an", "and", "any", "are", "as",
    "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
    "can", "could", "did", "do", "does", "doing", "down", "during", "each", "either", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him", "his",
    "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "may", "me", "might",
    "more", "most", "must", "my", "no", "nor", "not", "of", "off", "on", "once", "one", "only",
    "or", "other", "our", "ours", "out", "over", "own", "same", "she", "should", "so", "some",
    "such", "than", "that", "the", "their", "theirs", "them", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "until", "up", "us", "very", "was", "we",
    "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with",
    "would", "you", "your", "yours",
];

/// Lowercased alphanumeric tokens with a plural `s` folded.
fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let t = t.to_lowercase();
            match t.strip_suffix('s') {
                Some(stem) if stem.chars().count() >= 3 && !stem.ends_with('s') => stem.to_string(),
                _ => t,
            }
        })
        .collect()
}

fn content_tokens(text: &str) -> Vec<String> {
    let all = tokens(text);
    let content: Vec<String> = all
        .iter()
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .cloned()
        .collect();
    if !content.is_empty() {
        content
    } else if !all.is_empty() {
        all
    } else {
        // Symbol- or space-only text still gets a stable nonzero vector.
        if text.is_empty() {
            Vec::new()
        } else {
            vec![text.to_string()]
        }
    }
}

fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn l2_normalize<S: Scalar>(v: &mut [S]) {
    let norm = v.iter().map(|x| *x * *x).sum::<S>().sqrt();
    if norm > S::zero() {
        v.iter_mut().for_each(|x| *x = *x / norm);
    }
}

fn hashed_vector<S: Scalar>(text: &str, dimension: usize, seed: u64) -> Vec<S> {
    let mut v = vec![S::zero(); dimension];
    for t in content_tokens(text) {
        let slot = (fnv1a(seed, t.as_bytes()) % dimension as u64) as usize;
        v[slot] = v[slot] + S::one();
    }
    l2_normalize(&mut v);
    v
}

/// Reference backend: L2-normalized hashed term frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalBackend {
    pub dimension: usize,
    pub seed: u64,
}

impl Default for LexicalBackend {
    fn default() -> Self {
        Self {
            dimension: 1024,
            seed: 0x5eed_1e55,
        }
    }
}

impl<S: Scalar> EmbeddingBackend<S> for LexicalBackend {
    fn backend_id(&self) -> String {
        format!("lexical-fnv1a-d{}-s{:x}", self.dimension, self.seed)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<S>>, BackendError> {
        Ok(texts
            .iter()
            .map(|t| hashed_vector(t, self.dimension, self.seed))
            .collect())
    }
}

/// Local backend: mean-pooled static word vectors read from a text file
/// with one `word v1 v2 ... vn` record per line (GloVe/word2vec text
/// format; an optional `count dim` header line is skipped). Texts with no
/// known word fall back to the hashed lexical vector in the same space.
#[derive(Debug, Clone)]
pub struct StaticVectorBackend {
    id: String,
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl StaticVectorBackend {
    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let err = |message: String| BackendError::Model {
            path: path.display().to_string(),
            message,
        };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut vectors = HashMap::new();
        let mut dimension = 0;
        for (i, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
            let values = values.map_err(|e| err(format!("line {}: {e}", i + 1)))?;
            if i == 0 && values.len() == 1 && word.parse::<usize>().is_ok() {
                continue;
            }
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(err(format!("line {}: no finite components", i + 1)));
            }
            if dimension == 0 {
                dimension = values.len();
            } else if values.len() != dimension {
                return Err(err(format!(
                    "line {}: {} components, expected {dimension}",
                    i + 1,
                    values.len()
                )));
            }
            vectors.insert(word.to_lowercase(), values);
        }
        if vectors.is_empty() {
            return Err(err("no vectors".into()));
        }
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Self {
            id: format!("static-{stem}-d{dimension}-v{}", vectors.len()),
            dimension,
            vectors,
        })
    }

    fn embed_one<S: Scalar>(&self, text: &str) -> Vec<S> {
        let mut sum = vec![0.0f64; self.dimension];
        let mut hits = 0usize;
        for t in content_tokens(text) {
            let v = self
                .vectors
                .get(&t)
                .or_else(|| self.vectors.get(&format!("{t}s")));
            if let Some(v) = v {
                sum.iter_mut().zip(v).for_each(|(a, b)| *a += b);
                hits += 1;
            }
        }
        let mut out: Vec<S> = sum.into_iter().map(S::lit).collect();
        if hits == 0 || out.iter().all(|x| x.is_zero()) {
            return hashed_vector(text, self.dimension, LexicalBackend::default().seed);
        }
        l2_normalize(&mut out);
        out
    }
}

impl<S: Scalar> EmbeddingBackend<S> for StaticVectorBackend {
    fn backend_id(&self) -> String {
        self.id.clone()
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<S>>, BackendError> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpBackendConfig {
    pub url: String,
    #[serde(default)]
    pub model: Option<String>,
    /// Name of an environment variable holding a bearer token.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub retry: RetryPolicy,
    /// Known output dimension; probed with one request when absent.
    #[serde(default)]
    pub dimension: Option<usize>,
}

fn default_timeout() -> u64 {
    30
}

impl HttpBackendConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            model: None,
            token_env: None,
            timeout_secs: default_timeout(),
            retry: RetryPolicy::default(),
            dimension: None,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    /// OpenAI-compatible servers read `input`.
    input: &'a [&'a str],
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EmbedResponse {
    Plain { embeddings: Vec<Vec<f64>> },
    OpenAi { data: Vec<OpenAiItem> },
}

#[derive(Deserialize)]
struct OpenAiItem {
    embedding: Vec<f64>,
    #[serde(default)]
    index: Option<usize>,
}

/// Remote embedder: POSTs `{"texts": [...]}` and accepts
/// `{"embeddings": [[...]]}` or OpenAI-style `{"data": [{"embedding": [...]}]}`.
#[derive(Debug)]
pub struct HttpBackend {
    config: HttpBackendConfig,
    client: reqwest::blocking::Client,
    dimension: usize,
}

#[derive(Debug)]
enum CallError {
    Transient(String),
    Permanent(String),
}

impl std::fmt::Display for CallError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CallError::Transient(m) | CallError::Permanent(m) => f.write_str(m),
        }
    }
}

impl HttpBackend {
    pub fn connect(config: HttpBackendConfig) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .build()
            .map_err(|e| BackendError::Request {
                attempts: 0,
                message: e.to_string(),
            })?;
        let mut backend = Self {
            dimension: config.dimension.unwrap_or(0),
            config,
            client,
        };
        if backend.dimension == 0 {
            let probe = backend.request(&["dimension probe"])?;
            backend.dimension = probe.first().map_or(0, Vec::len);
            if backend.dimension == 0 {
                return Err(BackendError::Response("empty probe vector".into()));
            }
        }
        Ok(backend)
    }

    fn call(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, CallError> {
        let body = EmbedRequest {
            texts,
            model: self.config.model.as_deref(),
            input: texts,
        };
        let mut req = self.client.post(&self.config.url).json(&body);
        if let Some(var) = &self.config.token_env {
            if let Ok(token) = std::env::var(var) {
                req = req.bearer_auth(token);
            }
        }
        let resp = req.send().map_err(|e| CallError::Transient(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let msg = format!("HTTP {status} from {}", self.config.url);
            return Err(if status.is_server_error() || status.as_u16() == 429 || status.as_u16() == 408 {
                CallError::Transient(msg)
            } else {
                CallError::Permanent(msg)
            });
        }
        let parsed: EmbedResponse = resp
            .json()
            .map_err(|e| CallError::Permanent(format!("malformed response: {e}")))?;
        Ok(match parsed {
            EmbedResponse::Plain { embeddings } => embeddings,
            EmbedResponse::OpenAi { mut data } => {
                data.sort_by_key(|d| d.index.unwrap_or(usize::MAX));
                data.into_iter().map(|d| d.embedding).collect()
            }
        })
    }

    fn request(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, BackendError> {
        let out = retry(
            &self.config.retry,
            |e: &CallError| matches!(e, CallError::Transient(_)),
            |_| self.call(texts),
        );
        let vectors = out.result.map_err(|e| BackendError::Request {
            attempts: out.attempts,
            message: e.to_string(),
        })?;
        if vectors.len() != texts.len() {
            return Err(BackendError::Count {
                expected: texts.len(),
                got: vectors.len(),
            });
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(BackendError::Response("non-finite component".into()));
        }
        Ok(vectors)
    }
}

impl<S: Scalar> EmbeddingBackend<S> for HttpBackend {
    fn backend_id(&self) -> String {
        match &self.config.model {
            Some(m) => format!("http-{m}-d{}", self.dimension),
            None => format!("http-{}-d{}", self.config.url, self.dimension),
        }
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<S>>, BackendError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let vectors = self.request(texts)?;
        vectors
            .into_iter()
            .map(|v| {
                if v.len() != self.dimension {
                    return Err(BackendError::Dimension {
                        expected: self.dimension,
                        got: v.len(),
                    });
                }
                Ok(v.into_iter().map(S::lit).collect())
            })
            .collect()
    }

    fn is_concurrent(&self) -> bool {
        false
    }
}
