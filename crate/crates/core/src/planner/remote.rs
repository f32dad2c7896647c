//! Vision-language model planner over HTTP, or a latency-injecting stub when no endpoint is set.

use std::time::{Duration, Instant};

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{render_attachments, Attachment};
use super::rule::RuleBasedPlanner;
use super::types::{Latency, PlannerError, PlannerQuery, Reply};
use super::Planner;

pub const ENV_ENDPOINT: &str = "REEFNAV_PLANNER_ENDPOINT";
pub const ENV_MODEL: &str = "REEFNAV_PLANNER_MODEL";
pub const ENV_API_KEY: &str = "REEFNAV_PLANNER_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    /// Chat-completions style URL. Empty routes to the stub.
    pub endpoint: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub timeout_s: f64,
    /// Latency of the stub, ticks.
    pub stub_latency_ticks: u64,
    /// Tick length used to compare stub latency against the timeout, seconds.
    pub dt: f64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self { endpoint: String::new(), model: "gpt-4o".into(), api_key: None, timeout_s: 60.0, stub_latency_ticks: 100, dt: 0.1 }
    }
}

impl RemoteConfig {
    /// Overrides endpoint, model and key from the environment where set.
    pub fn with_env(mut self) -> Self {
        if let Ok(v) = std::env::var(ENV_ENDPOINT) {
            self.endpoint = v;
        }
        if let Ok(v) = std::env::var(ENV_MODEL) {
            if !v.is_empty() {
                self.model = v;
            }
        }
        if let Ok(v) = std::env::var(ENV_API_KEY) {
            if !v.is_empty() {
                self.api_key = Some(v);
            }
        }
        self
    }
}

/// Request body: one user message holding the prompt text followed by PNG data URLs.
pub fn request_body(model: &str, prompt: &str, images: &[Attachment]) -> Value {
    let b64 = base64::engine::general_purpose::STANDARD;
    let mut content = vec![json!({"type": "text", "text": prompt})];
    for a in images {
        content.push(json!({
            "type": "image_url",
            "image_url": {"url": format!("data:image/png;base64,{}", b64.encode(&a.png))},
            "name": a.name,
        }));
    }
    json!({"model": model, "messages": [{"role": "user", "content": content}]})
}

/// Model text from a response body: `choices[0].message.content` (string or parts), else a
/// top-level `text`/`output`/`content` string, else the body itself.
pub fn response_text(body: &Value) -> Option<String> {
    if let Some(c) = body.pointer("/choices/0/message/content") {
        match c {
            Value::String(s) => return Some(s.clone()),
            Value::Array(parts) => {
                let s: String = parts.iter().filter_map(|p| p.get("text").and_then(Value::as_str)).collect::<Vec<_>>().join("");
                return Some(s);
            }
            _ => {}
        }
    }
    for k in ["text", "output", "content", "response"] {
        if let Some(s) = body.get(k).and_then(Value::as_str) {
            return Some(s.to_owned());
        }
    }
    body.is_object().then(|| body.to_string())
}

/// Posts one query and returns the raw model text with the wall latency in seconds.
pub fn query_vlm(endpoint: &str, model: &str, api_key: Option<&str>, prompt: &str, images: &[Attachment], timeout: Duration) -> Result<(String, f64), PlannerError> {
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
    let start = Instant::now();
    let mut req = agent.post(endpoint).header("Content-Type", "application/json");
    if let Some(k) = api_key {
        req = req.header("Authorization", &format!("Bearer {k}"));
    }
    let body = request_body(model, prompt, images);
    let mut resp = req.send_json(&body).map_err(|e| match e {
        ureq::Error::Timeout(_) => PlannerError::Timeout(timeout.as_secs_f64()),
        other => PlannerError::Transport(other.to_string()),
    })?;
    let value: Value = resp.body_mut().read_json().map_err(|e| match e {
        ureq::Error::Timeout(_) => PlannerError::Timeout(timeout.as_secs_f64()),
        other => PlannerError::Transport(other.to_string()),
    })?;
    let text = response_text(&value).ok_or_else(|| PlannerError::Transport("response body has no text".into()))?;
    Ok((text, start.elapsed().as_secs_f64()))
}

/// Planner backed by a remote model; with an empty endpoint the rule-based heuristic answers
/// after `stub_latency_ticks`.
#[derive(Debug, Clone)]
pub struct VlmPlanner {
    pub config: RemoteConfig,
    stub: RuleBasedPlanner,
}

impl VlmPlanner {
    pub fn new(config: RemoteConfig) -> Self {
        let stub = RuleBasedPlanner::new(config.stub_latency_ticks);
        Self { config, stub }
    }

    pub fn is_stub(&self) -> bool {
        self.config.endpoint.trim().is_empty()
    }
}

impl Planner for VlmPlanner {
    fn name(&self) -> &'static str {
        if self.is_stub() { "vlm_stub" } else { "vlm" }
    }

    fn respond(&mut self, q: &PlannerQuery, prompt: &str) -> Result<Reply, PlannerError> {
        if self.is_stub() {
            let latency_s = self.config.stub_latency_ticks as f64 * self.config.dt;
            if latency_s > self.config.timeout_s {
                return Err(PlannerError::Timeout(self.config.timeout_s));
            }
            return self.stub.respond(q, prompt);
        }
        let images = render_attachments(q).map_err(|e| PlannerError::Transport(format!("attachment rendering failed: {e}")))?;
        let (text, secs) = query_vlm(
            &self.config.endpoint,
            &self.config.model,
            self.config.api_key.as_deref(),
            prompt,
            &images,
            Duration::from_secs_f64(self.config.timeout_s.max(0.001)),
        )?;
        Ok(Reply { text, latency: Latency::Wall(secs) })
    }

    fn simulated_latency_ticks(&self) -> Option<u64> {
        // a stub answer that would exceed the timeout arrives as an error at the timeout
        self.is_stub().then(|| {
            let timeout_ticks = (self.config.timeout_s / self.config.dt).ceil().max(0.0) as u64;
            self.config.stub_latency_ticks.min(timeout_ticks)
        })
    }
}
