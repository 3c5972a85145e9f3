//! Deterministic grid household simulator, its question oracle and metrics.

mod messy;
mod metrics;
mod oracle;
mod render;
mod scene;
mod world;

pub use messy::{
    evaluate_tidy, generate_messy, placement_energy, Displacement, MessyConfig, PlacementPrior,
};
pub use metrics::{evaluate, path_weight, GoalCondition, MetricsReport, ObjRef, TaskSpec, TidyMetrics};
pub use oracle::{bearing_phrase, Oracle, CANNOT_ANSWER};
pub use render::{render, MAX_RANGE};
pub use scene::{builtin_scene, parse_scene};
pub use world::{
    furniture_height, Aabb, Action, Agent, EpisodeStats, ObjectState, Placement, StateAttr,
    StepResult, Tile, World, WorldObject, INTERACTION_RANGE, ITEM_SIZE, WALL_HEIGHT,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("scene line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
}
