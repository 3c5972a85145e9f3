use std::collections::BTreeMap;

use super::{bounded, qa_rules, PlannerBackend, PlannerError, PlannerRequest, PlannerResponse};
use crate::memory::ExampleStore;
use crate::prompt::TemplateKind;
use crate::Catalog;

/// Returns the program of the rank-1 example in the prompt verbatim.
#[derive(Debug, Clone)]
pub struct RetrievalEchoBackend {
    programs: BTreeMap<String, String>,
    catalog: Catalog,
}

impl RetrievalEchoBackend {
    pub const ID: &'static str = "retrieval-echo";

    pub fn new(store: &ExampleStore, catalog: Catalog) -> Self {
        let programs = store.records().iter().map(|r| (r.id.clone(), r.program_text.clone())).collect();
        Self { programs, catalog }
    }
}

impl PlannerBackend for RetrievalEchoBackend {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, request: &PlannerRequest) -> Result<PlannerResponse, PlannerError> {
        let text = match request.prompt.kind {
            TemplateKind::Plan => {
                let id = request
                    .prompt
                    .example_ids
                    .first()
                    .ok_or_else(|| PlannerError::NoProgram("prompt carries no examples".into()))?;
                self.programs
                    .get(id)
                    .cloned()
                    .ok_or_else(|| PlannerError::NoProgram(format!("example `{id}` not in store")))?
            }
            _ => qa_rules::respond(&request.prompt, &self.catalog)?,
        };
        bounded(text, request, Self::ID, 0)
    }
}
