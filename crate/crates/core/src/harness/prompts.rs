use crate::assets;
use crate::executor::PromptSource;
use crate::memory::{
    retrieve_prompt, retrieve_top_k, Embedder, ExampleStore, RetrievalConfig, RetrievalMode, TemplateStore,
};
use crate::planner::FEEDBACK_MARKER;
use crate::prompt::{assemble_plan_prompt, builtin_shared_template, AssembledPrompt, PromptTemplate};
use crate::Catalog;

/// Builds plan prompts from example and template memory.
///
/// Retrieval is keyed on the instruction alone; feedback sentences appended
/// on replanning are kept in the prompt but not in the query.
pub struct MemoryPrompts<'a> {
    pub embedder: &'a dyn Embedder,
    pub examples: &'a ExampleStore,
    pub templates: &'a TemplateStore,
    pub retrieval: RetrievalConfig,
    pub shared_template: PromptTemplate,
    pub api_text: &'a str,
    pub classes: String,
}

impl<'a> MemoryPrompts<'a> {
    pub fn new(
        embedder: &'a dyn Embedder,
        examples: &'a ExampleStore,
        templates: &'a TemplateStore,
        retrieval: RetrievalConfig,
        catalog: &Catalog,
    ) -> Self {
        Self {
            embedder,
            examples,
            templates,
            retrieval,
            shared_template: builtin_shared_template(),
            api_text: assets::PLAN_API,
            classes: catalog.class_list(),
        }
    }
}

/// The instruction part of a possibly replanned command.
pub fn retrieval_query(command: &str) -> &str {
    command.split(FEEDBACK_MARKER).next().unwrap_or(command).trim()
}

impl PromptSource for MemoryPrompts<'_> {
    fn plan_prompt(&self, command: &str) -> Result<AssembledPrompt, String> {
        let query = retrieval_query(command);
        match self.retrieval.mode {
            RetrievalMode::PromptRetrieval => {
                let sel = retrieve_prompt(query, self.templates, self.examples, &self.retrieval, self.embedder)
                    .map_err(|e| e.to_string())?;
                let examples: Vec<_> = sel.examples.iter().map(|r| r.record).collect();
                assemble_plan_prompt(
                    &sel.template.template,
                    Some(sel.template.domain),
                    &examples,
                    self.api_text,
                    &self.classes,
                    command,
                )
                .map_err(|e| e.to_string())
            }
            RetrievalMode::SharedMemory => {
                let hits = retrieve_top_k(query, self.examples, &self.retrieval, None, self.embedder)
                    .map_err(|e| e.to_string())?;
                let examples: Vec<_> = hits.iter().map(|r| r.record).collect();
                assemble_plan_prompt(&self.shared_template, None, &examples, self.api_text, &self.classes, command)
                    .map_err(|e| e.to_string())
            }
        }
    }
}
