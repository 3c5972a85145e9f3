//! Data files shipped with the crate, embedded at compile time.
//!
//! Everything here can also be loaded from disk; the embedded copies are the
//! defaults used by the harness when no path is given.

pub const OBJECT_CLASSES: &str = include_str!("../assets/object_classes.txt");
pub const AFFORDANCES: &str = include_str!("../assets/affordances.txt");
pub const EXAMPLES: &str = include_str!("../assets/examples.jsonl");

pub const PLAN_API: &str = include_str!("../assets/plan_api.txt");
pub const QUESTION_API: &str = include_str!("../assets/question_api.txt");
pub const SEARCH_API: &str = include_str!("../assets/search_api.txt");

pub const TEMPLATE_MANIFEST: &str = include_str!("../assets/templates/manifest.jsonl");
pub const QUESTION_TEMPLATE: &str = include_str!("../assets/templates/question.txt");
pub const ANSWER_TEMPLATE: &str = include_str!("../assets/templates/answer.txt");
pub const SHARED_TEMPLATE: &str = include_str!("../assets/templates/shared.txt");

/// Plan templates by file name, as referenced from the manifest.
pub const PLAN_TEMPLATES: &[(&str, &str)] = &[
    ("teach.txt", include_str!("../assets/templates/teach.txt")),
    ("alfred.txt", include_str!("../assets/templates/alfred.txt")),
    ("dialfred.txt", include_str!("../assets/templates/dialfred.txt")),
    ("tidy.txt", include_str!("../assets/templates/tidy.txt")),
];

pub fn plan_template(file: &str) -> Option<&'static str> {
    PLAN_TEMPLATES
        .iter()
        .find(|(name, _)| *name == file)
        .map(|(_, body)| *body)
}

/// Scene files by name.
pub const SCENES: &[(&str, &str)] = &[
    ("kitchen_a", include_str!("../assets/scenes/kitchen_a.scene")),
    ("kitchen_b", include_str!("../assets/scenes/kitchen_b.scene")),
    ("kitchen_c", include_str!("../assets/scenes/kitchen_c.scene")),
    ("living_a", include_str!("../assets/scenes/living_a.scene")),
    ("living_b", include_str!("../assets/scenes/living_b.scene")),
    ("bedroom_a", include_str!("../assets/scenes/bedroom_a.scene")),
    ("bedroom_b", include_str!("../assets/scenes/bedroom_b.scene")),
    ("bathroom_a", include_str!("../assets/scenes/bathroom_a.scene")),
    ("house_a", include_str!("../assets/scenes/house_a.scene")),
];

pub fn scene(name: &str) -> Option<&'static str> {
    SCENES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
