use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{bounded, PlannerBackend, PlannerError, PlannerRequest, PlannerResponse};

/// Which chat-completion body shape the endpoint speaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireStyle {
    /// `{"messages": [...]}` answered by `choices[0].message.content`.
    ChatCompletions,
    /// `{"messages": [...], "max_tokens"}` answered by `content[0].text`.
    Messages,
}

/// Hosted chat model; credentials come from the environment.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    pub endpoint: String,
    pub model: String,
    pub api_key: String,
    pub style: WireStyle,
    pub timeout: Duration,
}

impl RemoteBackend {
    pub const ID: &'static str = "remote";
    pub const ENDPOINT_VAR: &'static str = "MNEMO_PLANNER_ENDPOINT";
    pub const MODEL_VAR: &'static str = "MNEMO_PLANNER_MODEL";
    pub const KEY_VAR: &'static str = "MNEMO_API_KEY";
    pub const STYLE_VAR: &'static str = "MNEMO_PLANNER_STYLE";

    pub fn from_env() -> Result<Self, PlannerError> {
        let var = |name: &str| std::env::var(name).map_err(|_| PlannerError::Config(name.to_string()));
        let style = match std::env::var(Self::STYLE_VAR).as_deref() {
            Ok("messages") => WireStyle::Messages,
            _ => WireStyle::ChatCompletions,
        };
        Ok(Self {
            endpoint: var(Self::ENDPOINT_VAR)?,
            model: var(Self::MODEL_VAR)?,
            api_key: var(Self::KEY_VAR)?,
            style,
            timeout: Duration::from_secs(120),
        })
    }

    fn body(&self, request: &PlannerRequest) -> Value {
        let messages = json!([{ "role": "user", "content": request.prompt.text }]);
        match self.style {
            WireStyle::ChatCompletions => json!({
                "model": self.model,
                "messages": messages,
                "temperature": request.temperature,
            }),
            WireStyle::Messages => json!({
                "model": self.model,
                "messages": messages,
                "temperature": request.temperature,
                "max_tokens": request.max_output_chars.div_ceil(4).max(1),
            }),
        }
    }
}

/// First text block of either response shape.
pub(crate) fn extract_text(response: &Value) -> Result<String, PlannerError> {
    response["choices"][0]["message"]["content"]
        .as_str()
        .or_else(|| response["content"][0]["text"].as_str())
        .map(str::to_string)
        .ok_or_else(|| PlannerError::Malformed("no text block in response".into()))
}

/// Strips a surrounding fenced code block, if any.
pub(crate) fn strip_fence(text: &str) -> String {
    let t = text.trim();
    match t.strip_prefix("```") {
        Some(rest) => {
            let body = rest.split_once('\n').map_or("", |(_, b)| b);
            body.trim_end().trim_end_matches("```").trim_end().to_string() + "\n"
        }
        None => t.to_string() + "\n",
    }
}

impl PlannerBackend for RemoteBackend {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, request: &PlannerRequest) -> Result<PlannerResponse, PlannerError> {
        let start = Instant::now();
        let mut call = ureq::post(&self.endpoint).timeout(self.timeout);
        call = match self.style {
            WireStyle::ChatCompletions => call.set("Authorization", &format!("Bearer {}", self.api_key)),
            WireStyle::Messages => call.set("x-api-key", &self.api_key).set("anthropic-version", "2023-06-01"),
        };
        let response = call.send_json(self.body(request)).map_err(|e| match e {
            ureq::Error::Transport(t) if t.kind() == ureq::ErrorKind::Io && t.to_string().contains("timed out") => {
                PlannerError::Timeout
            }
            other => PlannerError::Transport(other.to_string()),
        })?;
        let json: Value = response.into_json().map_err(|e| PlannerError::Malformed(e.to_string()))?;
        let text = strip_fence(&extract_text(&json)?);
        bounded(text, request, Self::ID, start.elapsed().as_millis() as u64)
    }
}
