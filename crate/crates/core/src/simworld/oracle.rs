use std::collections::BTreeMap;

use super::world::{World, WorldObject};
use crate::catalog::{spoken_name, Capability};
use crate::dsl::QaCall;

/// Returned when the oracle has nothing to say about the queried object.
pub const CANNOT_ANSWER: &str = "I cannot answer that question.";

/// Answers agent questions from ground truth.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Oracle {
    /// Instance the task is about, per category; otherwise the nearest one is used.
    pub preferred: BTreeMap<String, String>,
}

/// Relative bearing phrase from the agent to a world point.
pub fn bearing_phrase(world: &World, point: [f64; 3]) -> &'static str {
    let a = world.agent_pose().position;
    let yaw = (world.agent.yaw as f64).to_radians();
    let (dx, dz) = (point[0] - a[0], point[2] - a[2]);
    let ahead = dx * yaw.sin() + dz * yaw.cos();
    let right = dx * yaw.cos() - dz * yaw.sin();
    let angle = right.atan2(ahead).to_degrees();
    match angle {
        a if a.abs() <= 22.5 => "in front of you",
        a if (22.5..=67.5).contains(&a) => "to your front right",
        a if (67.5..=112.5).contains(&a) => "to your right",
        a if (112.5..=157.5).contains(&a) => "to your back right",
        a if (-67.5..=-22.5).contains(&a) => "to your front left",
        a if (-112.5..=-67.5).contains(&a) => "to your left",
        a if (-157.5..=-112.5).contains(&a) => "to your back left",
        _ => "behind you",
    }
}

fn preposition(world: &World, receptacle: &WorldObject) -> &'static str {
    let container = world.affordances.has(&receptacle.category, Capability::Openable)
        || world.affordances.has(&receptacle.category, Capability::Fillable)
        || matches!(receptacle.category.as_str(), "Sink" | "GarbageCan" | "Pan");
    if container {
        "in"
    } else {
        "on"
    }
}

impl Oracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_preferred(mut self, category: &str, id: &str) -> Self {
        self.preferred.insert(category.to_string(), id.to_string());
        self
    }

    fn target<'w>(&self, world: &'w World, category: &str) -> Option<&'w WorldObject> {
        if let Some(o) = self.preferred.get(category).and_then(|id| world.object(id)) {
            return Some(o);
        }
        let mut candidates: Vec<(&WorldObject, f64)> = world
            .of_category(category)
            .into_iter()
            .filter(|o| !world.is_held(&o.id))
            .filter_map(|o| world.horizontal_distance_to(&o.id).map(|d| (o, d)))
            .collect();
        candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.id.cmp(&b.0.id)));
        candidates.first().map(|(o, _)| *o)
    }

    pub fn answer(&self, world: &World, question: &QaCall) -> String {
        match question {
            QaCall::AskForLocation { category } => {
                let Some(obj) = self.target(world, category) else {
                    return CANNOT_ANSWER.to_string();
                };
                let Some(pos) = world.position(&obj.id) else {
                    return CANNOT_ANSWER.to_string();
                };
                let dir = bearing_phrase(world, pos);
                match obj.parent.as_deref().and_then(|p| world.object(p)) {
                    Some(parent) => format!(
                        "The {category} is {dir} {} the {}.",
                        preposition(world, parent),
                        spoken_name(&parent.category)
                    ),
                    None => format!("The {category} is {dir}."),
                }
            }
            QaCall::AskForDirection { category } => {
                let Some(obj) = self.target(world, category) else {
                    return CANNOT_ANSWER.to_string();
                };
                let (Some(pos), Some(dist)) = (world.position(&obj.id), world.horizontal_distance_to(&obj.id)) else {
                    return CANNOT_ANSWER.to_string();
                };
                let steps = (dist / world.cell_size).round() as u32;
                format!("The {category} is {}, about {steps} steps away.", bearing_phrase(world, pos))
            }
            QaCall::AskForAppearance { category } => {
                let Some(obj) = self.target(world, category) else {
                    return CANNOT_ANSWER.to_string();
                };
                let has = |cap| world.affordances.has(&obj.category, cap);
                let s = obj.state;
                let mut parts = Vec::new();
                if has(Capability::Cleanable) {
                    parts.push(if s.dirty { "dirty" } else { "clean" });
                }
                if has(Capability::Fillable) {
                    parts.push(if s.filled { "filled" } else { "empty" });
                }
                if has(Capability::Sliceable) {
                    parts.push(if s.sliced { "sliced" } else { "whole" });
                }
                if has(Capability::Heatable) && s.cooked {
                    parts.push("cooked");
                }
                if has(Capability::Openable) {
                    parts.push(if s.open { "open" } else { "closed" });
                }
                if has(Capability::Toggleable) {
                    parts.push(if s.on { "switched on" } else { "switched off" });
                }
                if parts.is_empty() {
                    format!("The {category} looks ordinary.")
                } else {
                    format!("The {category} is {}.", parts.join(" and "))
                }
            }
            _ => CANNOT_ANSWER.to_string(),
        }
    }
}
