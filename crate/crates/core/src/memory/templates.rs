use std::path::Path;

use serde::{Deserialize, Serialize};

use super::embedding::{Embedder, Embedding};
use super::store::{rank_order, top_k_by_embedding, ExampleStore, RetrievalConfig, RetrievalMode, Retrieved};
use super::MemoryError;
use crate::prompt::{PromptTemplate, TemplateKind};
use crate::Domain;

/// Manifest line describing one template file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateManifestEntry {
    pub id: String,
    pub domain: Domain,
    pub file: String,
    /// Text the template is keyed by; defaults to its first paragraph.
    #[serde(default)]
    pub key_text: Option<String>,
    pub example_ids: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PromptTemplateRecord {
    pub id: String,
    pub domain: Domain,
    pub template: PromptTemplate,
    pub key_text: String,
    pub key_embedding: Embedding,
    pub example_ids: Vec<String>,
}

impl PromptTemplateRecord {
    pub fn template_text(&self) -> &str {
        self.template.body()
    }
}

/// The role/task paragraph that opens a template.
pub fn first_paragraph(text: &str) -> String {
    text.trim_start()
        .split("\n\n")
        .next()
        .unwrap_or("")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct TemplateStore {
    templates: Vec<PromptTemplateRecord>,
}

impl TemplateStore {
    pub fn from_entries<'b>(
        entries: impl IntoIterator<Item = (TemplateManifestEntry, &'b str)>,
        embedder: &dyn Embedder,
        examples: &ExampleStore,
    ) -> Result<Self, MemoryError> {
        let mut templates: Vec<PromptTemplateRecord> = Vec::new();
        for (entry, body) in entries {
            let template = PromptTemplate::parse(body, TemplateKind::Plan)
                .map_err(|e| MemoryError::Template { id: entry.id.clone(), message: e.to_string() })?;
            if let Some(missing) = entry.example_ids.iter().find(|id| examples.get(id).is_none()) {
                return Err(MemoryError::UnknownExample { template: entry.id.clone(), example: missing.clone() });
            }
            let key_text = entry.key_text.clone().unwrap_or_else(|| first_paragraph(body));
            let key_embedding = embedder.embed(&key_text)?;
            if let Some(first) = templates.first() {
                if first.key_embedding.dim() != key_embedding.dim() {
                    return Err(MemoryError::Dimension {
                        expected: first.key_embedding.dim(),
                        got: key_embedding.dim(),
                    });
                }
            }
            templates.retain(|t| t.id != entry.id);
            templates.push(PromptTemplateRecord {
                id: entry.id,
                domain: entry.domain,
                template,
                key_text,
                key_embedding,
                example_ids: entry.example_ids,
            });
        }
        Ok(Self { templates })
    }

    pub fn parse_manifest(text: &str) -> Result<Vec<TemplateManifestEntry>, MemoryError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| MemoryError::Format { line: i + 1, message: e.to_string() })
            })
            .collect()
    }

    /// The four shipped domain templates.
    pub fn builtin(embedder: &dyn Embedder, examples: &ExampleStore) -> Result<Self, MemoryError> {
        let entries = Self::parse_manifest(crate::assets::TEMPLATE_MANIFEST)?;
        let mut pairs = Vec::new();
        for entry in entries {
            let body = crate::assets::plan_template(&entry.file)
                .ok_or_else(|| MemoryError::Template { id: entry.id.clone(), message: "missing file".into() })?;
            pairs.push((entry, body));
        }
        Self::from_entries(pairs, embedder, examples)
    }

    /// Loads `manifest.jsonl` plus the template files it names from `dir`.
    pub fn load_dir(dir: &Path, embedder: &dyn Embedder, examples: &ExampleStore) -> Result<Self, MemoryError> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| MemoryError::Io(format!("{}: {e}", p.display())));
        let entries = Self::parse_manifest(&read(&dir.join("manifest.jsonl"))?)?;
        let mut bodies = Vec::new();
        for entry in &entries {
            bodies.push(read(&dir.join(&entry.file))?);
        }
        Self::from_entries(entries.into_iter().zip(bodies.iter().map(String::as_str)), embedder, examples)
    }

    pub fn templates(&self) -> &[PromptTemplateRecord] {
        &self.templates
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PromptTemplateRecord> {
        self.templates.iter().find(|t| t.id == id)
    }
}

/// Result of prompt retrieval: the nearest template and its nearest examples.
#[derive(Debug, Clone)]
pub struct PromptSelection<'a> {
    pub template: &'a PromptTemplateRecord,
    pub template_distance: f64,
    pub examples: Vec<Retrieved<'a>>,
}

/// Nearest template, then top-k among that template's own examples. The
/// query is embedded once and reused for both stages.
pub fn retrieve_prompt<'a>(
    query: &str,
    templates: &'a TemplateStore,
    examples: &'a ExampleStore,
    cfg: &RetrievalConfig,
    embedder: &dyn Embedder,
) -> Result<PromptSelection<'a>, MemoryError> {
    if cfg.mode != RetrievalMode::PromptRetrieval {
        return Err(MemoryError::Config("prompt retrieval requires PROMPT_RETRIEVAL mode".into()));
    }
    if templates.is_empty() {
        return Err(MemoryError::Config("template store is empty".into()));
    }
    let q = embedder.embed(query)?;
    let mut best: Option<(&PromptTemplateRecord, f64)> = None;
    for t in templates.templates() {
        if t.key_embedding.dim() != q.dim() {
            return Err(MemoryError::Dimension { expected: t.key_embedding.dim(), got: q.dim() });
        }
        let d = cfg.distance.between(&q, &t.key_embedding);
        let better = match best {
            None => true,
            Some((b, bd)) => rank_order((d, &t.id), (bd, &b.id)).is_lt(),
        };
        if better {
            best = Some((t, d));
        }
    }
    let (template, template_distance) = best.expect("non-empty template store");
    let owned = examples.records().iter().filter(|r| template.example_ids.contains(&r.id));
    let examples = top_k_by_embedding(&q, owned, cfg.k, cfg.distance, None)?;
    Ok(PromptSelection { template, template_distance, examples })
}
