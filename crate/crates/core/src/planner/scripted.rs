use std::collections::BTreeMap;

use super::{bounded, qa_rules, PlannerBackend, PlannerError, PlannerRequest, PlannerResponse, FEEDBACK_MARKER};
use crate::prompt::TemplateKind;
use crate::Catalog;

/// Lowercased command with whitespace collapsed.
pub fn fingerprint(command: &str) -> String {
    command.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Returns canned programs keyed by command fingerprint.
///
/// A replan command extends the original with feedback sentences; it matches
/// the longest registered fingerprint it starts with, and the number of
/// feedback sentences selects which program of the entry is returned.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    programs: BTreeMap<String, Vec<String>>,
    catalog: Catalog,
}

impl ScriptedBackend {
    pub const ID: &'static str = "scripted";

    pub fn new(catalog: Catalog) -> Self {
        Self { programs: BTreeMap::new(), catalog }
    }

    /// Programs for successive attempts at `command`; the last one repeats.
    pub fn with_programs(mut self, command: &str, programs: Vec<String>) -> Self {
        self.insert(command, programs);
        self
    }

    pub fn with_program(self, command: &str, program: &str) -> Self {
        self.with_programs(command, vec![program.to_string()])
    }

    pub fn insert(&mut self, command: &str, programs: Vec<String>) {
        if !programs.is_empty() {
            self.programs.insert(fingerprint(command), programs);
        }
    }

    fn lookup(&self, command: &str) -> Option<&str> {
        let fp = fingerprint(command);
        let (key, programs) = self
            .programs
            .iter()
            .filter(|(k, _)| fp.starts_with(k.as_str()))
            .max_by_key(|(k, _)| k.len())?;
        let attempt = fp[key.len()..].matches(&fingerprint(FEEDBACK_MARKER)).count();
        programs.get(attempt).or(programs.last()).map(String::as_str)
    }
}

impl PlannerBackend for ScriptedBackend {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, request: &PlannerRequest) -> Result<PlannerResponse, PlannerError> {
        let text = match request.prompt.kind {
            TemplateKind::Plan => self
                .lookup(&request.prompt.command)
                .ok_or_else(|| PlannerError::NoProgram(request.prompt.command.clone()))?
                .to_string(),
            _ => qa_rules::respond(&request.prompt, &self.catalog)?,
        };
        bounded(text, request, Self::ID, 0)
    }
}
