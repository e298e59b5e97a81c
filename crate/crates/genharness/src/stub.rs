//! In-process chat-completion server for offline runs and tests.
//!
//! Serves `POST /v1/chat/completions` (OpenAI shape) and `POST /v1/messages`
//! (Anthropic shape) with a canned lesson plan. Faults can be queued per
//! model: a stall longer than the client timeout, or an error status.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use lessonlens::retry::RetryPolicy;
use serde_json::{json, Value};

use crate::provider::{ApiKind, ProviderConfig};

pub const STUB_TOKEN_ENV: &str = "LESSONLENS_STUB_TOKEN";
pub const STUB_TOKEN: &str = "stub-token";

/// Model names used for the default five-provider stub run.
pub const STUB_MODELS: [&str; 5] = ["ChatGPT", "Claude", "DeepSeek", "Gemini", "Grok"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    /// Sleep before answering normally.
    Stall(Duration),
    /// Answer with this status and an error body.
    Status(u16),
}

#[derive(Debug, Clone, Default)]
pub struct StubConfig {
    /// Accepted token; any token is accepted when `None`.
    pub token: Option<String>,
    /// Faults consumed in order, keyed by the request's `model` field.
    pub faults: HashMap<String, Vec<Fault>>,
    /// Delay added to every successful reply.
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedRequest {
    pub path: String,
    pub model: String,
    pub status: u16,
}

#[derive(Debug, Default)]
struct State {
    faults: HashMap<String, VecDeque<Fault>>,
    requests: Vec<RecordedRequest>,
    in_flight: HashMap<String, usize>,
    max_in_flight_per_model: HashMap<String, usize>,
    in_flight_total: usize,
    max_in_flight_total: usize,
}

pub struct StubServer {
    addr: SocketAddr,
    state: Arc<Mutex<State>>,
    stop: Arc<AtomicBool>,
    handle: Option<thread::JoinHandle<()>>,
}

impl StubServer {
    pub fn start(config: StubConfig) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let state = Arc::new(Mutex::new(State {
            faults: config
                .faults
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            ..State::default()
        }));
        let stop = Arc::new(AtomicBool::new(false));
        let config = Arc::new(config);
        let handle = {
            let (state, stop) = (state.clone(), stop.clone());
            thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let (state, config) = (state.clone(), config.clone());
                    thread::spawn(move || {
                        let _ = handle(stream, &state, &config);
                    });
                }
            })
        };
        Ok(Self {
            addr,
            state,
            stop,
            handle: Some(handle),
        })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.state.lock().unwrap().requests.clone()
    }

    /// Most concurrent requests seen for any single model.
    pub fn max_in_flight_per_model(&self) -> usize {
        let s = self.state.lock().unwrap();
        s.max_in_flight_per_model.values().copied().max().unwrap_or(0)
    }

    pub fn max_in_flight_total(&self) -> usize {
        self.state.lock().unwrap().max_in_flight_total
    }

    /// Providers named after [`STUB_MODELS`] pointing at this server. Claude
    /// goes through the Anthropic adapter, the rest through the OpenAI one.
    pub fn providers(&self, timeout_secs: f64, retry: RetryPolicy) -> Vec<ProviderConfig> {
        STUB_MODELS
            .iter()
            .map(|name| {
                let kind = if *name == "Claude" { ApiKind::Anthropic } else { ApiKind::Openai };
                let path = match kind {
                    ApiKind::Openai => "/v1/chat/completions",
                    ApiKind::Anthropic => "/v1/messages",
                };
                ProviderConfig {
                    name: name.to_string(),
                    kind,
                    endpoint: format!("{}{path}", self.base_url()),
                    model: format!("stub-{}", name.to_lowercase()),
                    token_env: STUB_TOKEN_ENV.into(),
                    temperature: None,
                    max_tokens: None,
                    timeout_secs,
                    retry,
                }
            })
            .collect()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

struct Request {
    path: String,
    token: Option<String>,
    body: Value,
}

fn read_request(stream: &TcpStream) -> std::io::Result<Request> {
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let path = line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut length = 0;
    let mut token = None;
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h)? == 0 || h == "\r\n" {
            break;
        }
        let Some((name, value)) = h.split_once(':') else { continue };
        let value = value.trim();
        match name.trim().to_ascii_lowercase().as_str() {
            "content-length" => length = value.parse().unwrap_or(0),
            "authorization" => token = value.strip_prefix("Bearer ").map(str::to_string),
            "x-api-key" => token = Some(value.to_string()),
            _ => {}
        }
    }
    let mut buf = vec![0; length];
    reader.read_exact(&mut buf)?;
    let body = serde_json::from_slice(&buf).unwrap_or(Value::Null);
    Ok(Request { path, token, body })
}

fn respond(mut stream: &TcpStream, status: u16, body: &Value) -> std::io::Result<()> {
    let text = body.to_string();
    write!(
        stream,
        "HTTP/1.1 {status} STUB\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{text}",
        text.len()
    )?;
    stream.flush()
}

fn handle(stream: TcpStream, state: &Mutex<State>, config: &StubConfig) -> std::io::Result<()> {
    let req = read_request(&stream)?;
    let model = req.body.get("model").and_then(Value::as_str).unwrap_or("").to_string();
    let prompt = req
        .body
        .pointer("/messages/0/content")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();

    let fault = {
        let mut s = state.lock().unwrap();
        let fault = s.faults.get_mut(&model).and_then(VecDeque::pop_front);
        let n = s.in_flight.entry(model.clone()).or_insert(0);
        *n += 1;
        let n = *n;
        let m = s.max_in_flight_per_model.entry(model.clone()).or_insert(0);
        *m = (*m).max(n);
        s.in_flight_total += 1;
        s.max_in_flight_total = s.max_in_flight_total.max(s.in_flight_total);
        fault
    };

    let authorized = match &config.token {
        Some(t) => req.token.as_deref() == Some(t.as_str()),
        None => true,
    };
    let (status, body) = if !authorized {
        leave(state, &model);
        (401, json!({"error": {"message": "invalid token"}}))
    } else {
        match fault {
            Some(Fault::Status(code)) => {
                leave(state, &model);
                (code, json!({"error": {"message": "injected fault"}}))
            }
            Some(Fault::Stall(d)) => {
                // The client gives up on a stalled call; stop counting it.
                leave(state, &model);
                thread::sleep(d);
                (200, reply(&req.path, &model, &prompt))
            }
            None => {
                thread::sleep(config.latency);
                leave(state, &model);
                (200, reply(&req.path, &model, &prompt))
            }
        }
    };
    {
        let mut s = state.lock().unwrap();
        s.requests.push(RecordedRequest {
            path: req.path.clone(),
            model,
            status,
        });
    }
    respond(&stream, status, &body)
}

fn leave(state: &Mutex<State>, model: &str) {
    let mut s = state.lock().unwrap();
    if let Some(n) = s.in_flight.get_mut(model) {
        *n -= 1;
    }
    s.in_flight_total -= 1;
}

fn reply(path: &str, model: &str, prompt: &str) -> Value {
    let text = canned_plan(model, prompt);
    if path.ends_with("/messages") {
        json!({
            "type": "message",
            "role": "assistant",
            "model": model,
            "content": [{"type": "text", "text": text}],
        })
    } else {
        json!({
            "object": "chat.completion",
            "model": model,
            "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
        })
    }
}

/// A short, well-formed plan so stub corpora can be evaluated end to end.
pub fn canned_plan(model: &str, prompt: &str) -> String {
    let first = prompt.lines().next().unwrap_or("");
    format!(
        "# Lesson Plan ({model})\n\
         Prompt: {first}\n\n\
         ## Learning Objectives\n\
         - Identify the regions of the electromagnetic spectrum in order.\n\
         - Explain how wavelength and frequency are related by c = λf.\n\
         - Calculate photon energy with E = hf.\n\n\
         ## Materials\n\
         - Prism, flashlight, UV beads.\n\n\
         ## Activities\n\
         Students observe white light passing through a prism. They discuss why radio waves have lower frequency than gamma rays. \
         The speed of light is c = 3.00 × 10^8 m/s and Planck's constant h = 6.626 × 10^-34 J·s. \
         The bands are radio waves, microwaves, infrared, visible light, ultraviolet, X-rays and gamma rays.\n\n\
         ## Assessment\n\
         A short exit ticket checks each objective.\n"
    )
}
