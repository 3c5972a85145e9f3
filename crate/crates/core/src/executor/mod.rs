//! Runs plan programs against a world: macro expansion, precondition checks,
//! object search, question asking and replanning.

mod log;
mod macros;
mod runner;

use serde::{Deserialize, Serialize};

use crate::dsl::ObjectBinding;
use crate::prompt::AssembledPrompt;
use crate::spatial::{ExploreConfig, ObjectMemory};

pub use log::{EpisodeLog, LogError, LogEvent, ReplayVerdict};
pub use macros::{MacroSpec, MacroTable, Precondition, Primitive};
pub use runner::{run_episode, EpisodeResult, Executor, Services};

/// Items within this horizontal distance of a landmark count as near it.
pub const LANDMARK_RADIUS: f64 = 0.6;

/// Categories `put_down` may leave an object on, in preference order.
pub const PUT_DOWN_SURFACES: [&str; 7] = ["CounterTop", "DiningTable", "SideTable", "Desk", "Shelf", "Sofa", "Bed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_steps: u32,
    pub max_api_failures: u32,
    pub max_replans: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { max_steps: 1000, max_api_failures: 30, max_replans: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPolicy {
    pub enabled: bool,
    pub max_questions: u32,
}

impl QaPolicy {
    pub fn disabled() -> Self {
        Self { enabled: false, max_questions: 0 }
    }

    pub fn enabled() -> Self {
        Self { enabled: true, max_questions: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub budgets: Budgets,
    pub qa: QaPolicy,
    /// Insert recovery actions for unmet preconditions.
    pub preconditions: bool,
    pub seed: u64,
    pub explore: ExploreConfig,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            budgets: Budgets::default(),
            qa: QaPolicy::disabled(),
            preconditions: true,
            seed: 0,
            explore: ExploreConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EpisodeStatus {
    Running,
    Success,
    FailureBudget,
    FailurePlan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeState {
    pub held_object: Option<String>,
    pub steps_taken: u32,
    pub api_failures: u32,
    pub replans_used: u32,
    pub qa_budget_used: u32,
    pub status: EpisodeStatus,
}

impl Default for EpisodeState {
    fn default() -> Self {
        Self {
            held_object: None,
            steps_taken: 0,
            api_failures: 0,
            replans_used: 0,
            qa_budget_used: 0,
            status: EpisodeStatus::Running,
        }
    }
}

/// Why a plan stopped, rendered into the next planning request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureFeedback {
    pub failed_action: String,
    pub reason: String,
    pub suggested_search: Option<String>,
}

impl FailureFeedback {
    pub fn new(action: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { failed_action: action.into(), reason: reason.into(), suggested_search: None }
    }

    pub fn with_search(mut self, landmark: Option<String>) -> Self {
        self.suggested_search = landmark;
        self
    }

    pub fn sentence(&self) -> String {
        let mut s = format!(
            "{}: {} failed because {}.",
            crate::planner::FEEDBACK_MARKER,
            self.failed_action,
            self.reason.trim_end_matches('.')
        );
        if let Some(l) = &self.suggested_search {
            s.push_str(&format!(" Try searching near the {}.", crate::catalog::spoken_name(l)));
        }
        s
    }
}

/// Builds the planning prompt for a (possibly feedback-extended) command.
pub trait PromptSource: Send + Sync {
    fn plan_prompt(&self, command: &str) -> Result<AssembledPrompt, String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Found(String),
    NeedsSearch,
    Ambiguous(Vec<String>),
}

/// Instances of `category` known to memory, minus `exclude`.
fn known_instances<'m>(memory: &'m ObjectMemory, category: &str, exclude: &[String]) -> Vec<(&'m str, [f64; 3])> {
    let mut out: Vec<(&str, [f64; 3])> = memory
        .of_category(category)
        .filter_map(|(_, e)| e.instance.as_deref().map(|i| (i, e.centroid)))
        .filter(|(i, _)| !exclude.iter().any(|x| x == i))
        .collect();
    out.sort_by(|a, b| a.0.cmp(b.0));
    out
}

/// Horizontal distance from `p` to the nearest remembered `landmark`.
pub(crate) fn landmark_distance(memory: &ObjectMemory, landmark: &str, p: [f64; 3]) -> Option<f64> {
    memory
        .of_category(landmark)
        .map(|(_, e)| e.horizontal_distance(p[0], p[2]))
        .min_by(f64::total_cmp)
}

/// Matches a binding against object memory.
///
/// A landmark keeps only instances within [`LANDMARK_RADIUS`] of a
/// remembered landmark; instances bound to other variables are skipped.
pub fn resolve_object(binding: &ObjectBinding, memory: &ObjectMemory, exclude: &[String]) -> Resolution {
    let mut candidates = known_instances(memory, &binding.category, exclude);
    if let Some(landmark) = &binding.landmark {
        candidates.retain(|(_, c)| landmark_distance(memory, landmark, *c).is_some_and(|d| d <= LANDMARK_RADIUS));
    }
    match candidates.as_slice() {
        [] => Resolution::NeedsSearch,
        [(id, _)] => Resolution::Found(id.to_string()),
        many => Resolution::Ambiguous(many.iter().map(|(id, _)| id.to_string()).collect()),
    }
}
