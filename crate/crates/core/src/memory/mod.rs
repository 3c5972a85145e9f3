//! Language-keyed example memory and prompt-template memory.

mod embedding;
mod store;
mod templates;

use thiserror::Error;

use crate::dsl::ParseError;

pub use embedding::{EmbedError, Embedder, Embedding, HashedBagEmbedder, RemoteEmbedder};
pub use store::{
    ingest_examples, retrieve_top_k, top_k_by_embedding, DistanceKind, ExampleRecord, ExampleSource,
    ExampleStore, RetrievalConfig, RetrievalMode, Retrieved,
};
pub use templates::{
    first_paragraph, retrieve_prompt, PromptSelection, PromptTemplateRecord, TemplateManifestEntry,
    TemplateStore,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MemoryError {
    #[error("example `{id}`: program does not parse: {source}")]
    Ingest { id: String, source: ParseError },
    #[error("example `{id}`: empty key text")]
    EmptyKey { id: String },
    #[error("embedding dimension mismatch: store has {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("embedding failed: {0}")]
    Embed(#[from] EmbedError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("template `{id}`: {message}")]
    Template { id: String, message: String },
    #[error("template `{template}` references unknown example `{example}`")]
    UnknownExample { template: String, example: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}
