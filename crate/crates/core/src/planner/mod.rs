//! Plan generation backends behind one interface.

mod echo;
mod qa_rules;
mod remote;
mod scripted;

use serde::{Deserialize, Serialize};

use crate::prompt::AssembledPrompt;

pub use echo::RetrievalEchoBackend;
pub use qa_rules::{answer_to_script, question_for_context};
pub use remote::{RemoteBackend, WireStyle};
pub use scripted::{fingerprint, ScriptedBackend};

/// Starts the sentence appended to a command when asking for a new plan.
pub const FEEDBACK_MARKER: &str = "The previous plan failed";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlannerError {
    #[error("request timed out")]
    Timeout,
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("output of {got} characters exceeds the limit of {limit}")]
    OverLength { limit: usize, got: usize },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no program for this prompt: {0}")]
    NoProgram(String),
    #[error("invalid request: {0}")]
    Request(String),
    #[error("missing configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerRequest {
    pub prompt: AssembledPrompt,
    pub temperature: f64,
    pub max_output_chars: usize,
}

impl PlannerRequest {
    pub const DEFAULT_MAX_OUTPUT_CHARS: usize = 8000;

    pub fn new(prompt: AssembledPrompt, temperature: f64, max_output_chars: usize) -> Result<Self, PlannerError> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(PlannerError::Request(format!("temperature must be finite and >= 0, got {temperature}")));
        }
        if max_output_chars == 0 {
            return Err(PlannerError::Request("max_output_chars must be positive".into()));
        }
        Ok(Self { prompt, temperature, max_output_chars })
    }

    /// Temperature 0 and the default output limit.
    pub fn greedy(prompt: AssembledPrompt) -> Self {
        Self { prompt, temperature: 0.0, max_output_chars: Self::DEFAULT_MAX_OUTPUT_CHARS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerResponse {
    pub program_text: String,
    pub backend_id: String,
    pub latency_ms: u64,
}

pub trait PlannerBackend: Send + Sync {
    fn id(&self) -> &str;

    fn generate(&self, request: &PlannerRequest) -> Result<PlannerResponse, PlannerError>;
}

pub(crate) fn bounded(
    text: String,
    request: &PlannerRequest,
    backend_id: &str,
    latency_ms: u64,
) -> Result<PlannerResponse, PlannerError> {
    let got = text.chars().count();
    if got > request.max_output_chars {
        return Err(PlannerError::OverLength { limit: request.max_output_chars, got });
    }
    Ok(PlannerResponse { program_text: text, backend_id: backend_id.to_string(), latency_ms })
}
