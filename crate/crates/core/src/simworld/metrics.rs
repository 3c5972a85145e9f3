use serde::{Deserialize, Serialize};

use super::world::{EpisodeStats, StateAttr, World, WorldObject};
use crate::Domain;

/// Refers to one instance, or to any instance of a category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjRef {
    Id(String),
    AnyOf(String),
}

impl ObjRef {
    fn resolve<'w>(&self, world: &'w World) -> Vec<&'w WorldObject> {
        match self {
            ObjRef::Id(id) => world.object(id).into_iter().collect(),
            ObjRef::AnyOf(cat) => world.of_category(cat),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoalCondition {
    ObjectState { object: ObjRef, attr: StateAttr, value: bool },
    /// `object` rests in or on `receptacle`, possibly through intermediate containers.
    InReceptacle { object: ObjRef, receptacle: ObjRef },
}

impl GoalCondition {
    pub fn holds(&self, world: &World) -> bool {
        match self {
            GoalCondition::ObjectState { object, attr, value } => {
                object.resolve(world).iter().any(|o| o.state.get(*attr) == *value)
            }
            GoalCondition::InReceptacle { object, receptacle } => {
                let targets = receptacle.resolve(world);
                object.resolve(world).iter().any(|o| {
                    world.ancestors(&o.id).iter().any(|a| targets.iter().any(|t| t.id == a.id))
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub domain: Domain,
    pub goal_conditions: Vec<GoalCondition>,
    pub expert_path_length: u32,
}

impl TaskSpec {
    pub fn new(
        task_id: impl Into<String>,
        domain: Domain,
        goal_conditions: Vec<GoalCondition>,
        expert_path_length: u32,
    ) -> Result<Self, super::SimError> {
        if goal_conditions.is_empty() {
            return Err(super::SimError::Scene("task needs at least one goal condition".into()));
        }
        if expert_path_length == 0 {
            return Err(super::SimError::Scene("expert path length must be positive".into()));
        }
        Ok(Self { task_id: task_id.into(), domain, goal_conditions, expert_path_length })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TidyMetrics {
    pub correctly_moved: u32,
    pub incorrectly_moved: u32,
    /// Percent; 0 is fully restored, 100 is the untouched mess.
    pub energy: f64,
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task_id: String,
    pub success: f64,
    pub goal_condition: f64,
    pub path_weighted_success: f64,
    pub path_weighted_goal_condition: f64,
    pub agent_path_length: u32,
    pub expert_path_length: u32,
    pub steps: u32,
    pub api_failures: u32,
    pub tidy: Option<TidyMetrics>,
}

/// `min(1, expert / agent)`; an agent that never moved gets weight 1.
pub fn path_weight(expert: u32, agent: u32) -> f64 {
    if agent == 0 {
        1.0
    } else {
        (expert as f64 / agent as f64).min(1.0)
    }
}

pub fn evaluate(world: &World, task: &TaskSpec, stats: &EpisodeStats) -> MetricsReport {
    let n = task.goal_conditions.len();
    let satisfied = task.goal_conditions.iter().filter(|g| g.holds(world)).count();
    let gc = if n == 0 { 0.0 } else { satisfied as f64 / n as f64 };
    let sr = if n > 0 && satisfied == n { 1.0 } else { 0.0 };
    let w = path_weight(task.expert_path_length, stats.path_length);
    MetricsReport {
        task_id: task.task_id.clone(),
        success: sr,
        goal_condition: gc,
        path_weighted_success: sr * w,
        path_weighted_goal_condition: gc * w,
        agent_path_length: stats.path_length,
        expert_path_length: task.expert_path_length,
        steps: stats.steps,
        api_failures: stats.api_failures,
        tidy: None,
    }
}
