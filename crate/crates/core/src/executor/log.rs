use serde::{Deserialize, Serialize};

use super::EpisodeStatus;
use crate::simworld::{Action, World};

/// One line of an episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Start { episode_id: String, command: String, world: Box<World> },
    Plan { attempt: u32, command: String, backend_id: String, example_ids: Vec<String>, program_text: String },
    PlanRejected { attempt: u32, reason: String },
    Question { context: String, question: String, answer: String, script: String },
    Action { index: u32, action: Action, success: bool, reason: Option<String> },
    Feedback { sentence: String },
    End { status: EpisodeStatus, steps: u32, api_failures: u32, final_hash: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub events: Vec<LogEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("log line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("log has no start event")]
    MissingStart,
    #[error("log has no end event")]
    MissingEnd,
}

/// Outcome of re-stepping a log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayVerdict {
    pub episode_id: String,
    pub actions: usize,
    pub expected_hash: String,
    pub replayed_hash: String,
    /// Index of the first action whose success differed from the log.
    pub first_divergence: Option<u32>,
}

impl ReplayVerdict {
    pub fn verified(&self) -> bool {
        self.first_divergence.is_none() && self.expected_hash == self.replayed_hash
    }
}

impl EpisodeLog {
    pub fn push(&mut self, event: LogEvent) {
        self.events.push(event);
    }

    pub fn actions(&self) -> impl Iterator<Item = (&Action, bool)> {
        self.events.iter().filter_map(|e| match e {
            LogEvent::Action { action, success, .. } => Some((action, *success)),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("log events serialise") + "\n")
            .collect()
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, LogError> {
        let events = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| LogError::Parse { line: i + 1, message: e.to_string() }))
            .collect::<Result<_, _>>()?;
        Ok(Self { events })
    }

    /// Re-steps the initial world through the logged actions.
    pub fn replay(&self) -> Result<ReplayVerdict, LogError> {
        let (episode_id, mut world) = self
            .events
            .iter()
            .find_map(|e| match e {
                LogEvent::Start { episode_id, world, .. } => Some((episode_id.clone(), (**world).clone())),
                _ => None,
            })
            .ok_or(LogError::MissingStart)?;
        let expected_hash = self
            .events
            .iter()
            .rev()
            .find_map(|e| match e {
                LogEvent::End { final_hash, .. } => Some(final_hash.clone()),
                _ => None,
            })
            .ok_or(LogError::MissingEnd)?;
        let mut first_divergence = None;
        let mut actions = 0;
        for e in &self.events {
            if let LogEvent::Action { index, action, success, .. } = e {
                let r = world.step(action);
                actions += 1;
                if r.success != *success && first_divergence.is_none() {
                    first_divergence = Some(*index);
                }
            }
        }
        Ok(ReplayVerdict { episode_id, actions, expected_hash, replayed_hash: world.state_hash(), first_divergence })
    }
}
