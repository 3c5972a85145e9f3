use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::embedding::{Embedder, Embedding};
use super::MemoryError;
use crate::catalog::Catalog;
use crate::dsl::parse_plan;
use crate::Domain;

/// An example as read from disk, before embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleSource {
    pub id: String,
    pub domain: Domain,
    pub key_text: String,
    pub program_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Embedding>,
}

/// One language → program memory entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub id: String,
    pub domain: Domain,
    pub key_text: String,
    pub program_text: String,
    pub key_embedding: Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistanceKind {
    #[default]
    Euclidean,
    Cosine,
}

impl DistanceKind {
    pub fn between(self, a: &Embedding, b: &Embedding) -> f64 {
        match self {
            DistanceKind::Euclidean => a.euclidean(b),
            DistanceKind::Cosine => a.cosine_distance(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RetrievalMode {
    /// Nearest template first, then examples owned by that template.
    PromptRetrieval,
    /// One cross-domain example pool, no domain filter.
    SharedMemory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub k: usize,
    pub distance: DistanceKind,
    pub mode: RetrievalMode,
}

impl RetrievalConfig {
    pub const DEFAULT_K: usize = 3;

    pub fn new(k: usize, mode: RetrievalMode) -> Result<Self, MemoryError> {
        if k == 0 {
            return Err(MemoryError::Config("k must be at least 1".into()));
        }
        Ok(Self { k, distance: DistanceKind::Euclidean, mode })
    }
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self { k: Self::DEFAULT_K, distance: DistanceKind::Euclidean, mode: RetrievalMode::SharedMemory }
    }
}

/// A retrieved record and its distance to the query.
#[derive(Debug, Clone, Copy)]
pub struct Retrieved<'a> {
    pub record: &'a ExampleRecord,
    pub distance: f64,
}

/// Immutable-after-ingest example memory.
#[derive(Debug, Clone, Default)]
pub struct ExampleStore {
    records: Vec<ExampleRecord>,
}

impl ExampleStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the line-per-record format: one JSON object per non-empty line.
    pub fn parse_sources(text: &str) -> Result<Vec<ExampleSource>, MemoryError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| MemoryError::Format { line: i + 1, message: e.to_string() })
            })
            .collect()
    }

    /// Builds a store from the shipped example corpus.
    pub fn builtin(embedder: &dyn Embedder, catalog: &Catalog) -> Result<Self, MemoryError> {
        let sources = Self::parse_sources(crate::assets::EXAMPLES)?;
        ingest_examples(sources, embedder, catalog)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ExampleRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&ExampleRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn dim(&self) -> Option<usize> {
        self.records.first().map(|r| r.key_embedding.dim())
    }

    /// Adds records; all-or-nothing. Duplicate ids replace earlier records.
    pub fn ingest(
        &mut self,
        sources: impl IntoIterator<Item = ExampleSource>,
        embedder: &dyn Embedder,
        catalog: &Catalog,
    ) -> Result<(), MemoryError> {
        let mut staged = self.records.clone();
        let mut dim = self.dim();
        for src in sources {
            if src.key_text.trim().is_empty() {
                return Err(MemoryError::EmptyKey { id: src.id });
            }
            parse_plan(&src.program_text, catalog)
                .map_err(|source| MemoryError::Ingest { id: src.id.clone(), source })?;
            let key_embedding = match src.embedding {
                Some(e) => e,
                None => embedder.embed(&src.key_text)?,
            };
            let expected = *dim.get_or_insert(key_embedding.dim());
            if key_embedding.dim() != expected {
                return Err(MemoryError::Dimension { expected, got: key_embedding.dim() });
            }
            let record = ExampleRecord {
                id: src.id,
                domain: src.domain,
                key_text: src.key_text,
                program_text: src.program_text,
                key_embedding,
            };
            match staged.iter_mut().find(|r| r.id == record.id) {
                Some(slot) => *slot = record,
                None => staged.push(record),
            }
        }
        self.records = staged;
        Ok(())
    }

    /// Subset of this store restricted to the given domains.
    pub fn filtered(&self, domains: &[Domain]) -> Self {
        Self { records: self.records.iter().filter(|r| domains.contains(&r.domain)).cloned().collect() }
    }

    /// Subset of this store with exactly the given ids (unknown ids ignored).
    pub fn subset(&self, ids: &[String]) -> Self {
        Self { records: self.records.iter().filter(|r| ids.contains(&r.id)).cloned().collect() }
    }
}

/// Builds a fresh store from a record stream.
pub fn ingest_examples(
    source: impl IntoIterator<Item = ExampleSource>,
    embedder: &dyn Embedder,
    catalog: &Catalog,
) -> Result<ExampleStore, MemoryError> {
    let mut store = ExampleStore::new();
    store.ingest(source, embedder, catalog)?;
    Ok(store)
}

/// Ascending distance, then ascending id.
pub(crate) fn rank_order(a: (f64, &str), b: (f64, &str)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1))
}

/// Top-k over an already embedded query.
pub fn top_k_by_embedding<'a>(
    query: &Embedding,
    records: impl IntoIterator<Item = &'a ExampleRecord>,
    k: usize,
    distance: DistanceKind,
    domain_filter: Option<Domain>,
) -> Result<Vec<Retrieved<'a>>, MemoryError> {
    let mut scored = Vec::new();
    for record in records {
        if domain_filter.is_some_and(|d| d != record.domain) {
            continue;
        }
        if record.key_embedding.dim() != query.dim() {
            return Err(MemoryError::Dimension { expected: record.key_embedding.dim(), got: query.dim() });
        }
        scored.push(Retrieved { record, distance: distance.between(query, &record.key_embedding) });
    }
    scored.sort_by(|a, b| rank_order((a.distance, &a.record.id), (b.distance, &b.record.id)));
    scored.truncate(k);
    Ok(scored)
}

/// Returns up to `cfg.k` records nearest to `query`.
pub fn retrieve_top_k<'a>(
    query: &str,
    store: &'a ExampleStore,
    cfg: &RetrievalConfig,
    domain_filter: Option<Domain>,
    embedder: &dyn Embedder,
) -> Result<Vec<Retrieved<'a>>, MemoryError> {
    if store.is_empty() {
        return Ok(Vec::new());
    }
    let q = embedder.embed(query)?;
    let filter = match cfg.mode {
        RetrievalMode::SharedMemory => None,
        RetrievalMode::PromptRetrieval => domain_filter,
    };
    top_k_by_embedding(&q, store.records(), cfg.k, cfg.distance, filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::HashedBagEmbedder;

    fn src(id: &str, domain: Domain, key: &str) -> ExampleSource {
        ExampleSource {
            id: id.into(),
            domain,
            key_text: key.into(),
            program_text: "a = InteractionObject('Apple')\na.pickup()\n".into(),
            embedding: None,
        }
    }

    #[test]
    fn builtin_corpus_counts() {
        let store = ExampleStore::builtin(&HashedBagEmbedder::default(), &Catalog::builtin()).unwrap();
        let count = |d| store.records().iter().filter(|r| r.domain == d).count();
        assert_eq!(store.len(), 28);
        assert_eq!(count(Domain::Teach), 11);
        assert_eq!(count(Domain::Alfred), 7);
        assert_eq!(count(Domain::Dialfred), 7);
        assert_eq!(count(Domain::Tidy), 3);
    }

    #[test]
    fn empty_store_retrieves_nothing() {
        let store = ingest_examples(vec![], &HashedBagEmbedder::default(), &Catalog::builtin()).unwrap();
        let out = retrieve_top_k("anything", &store, &RetrievalConfig::default(), None, &HashedBagEmbedder::default())
            .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn unparseable_program_names_record_and_leaves_store_unchanged() {
        let e = HashedBagEmbedder::default();
        let cat = Catalog::builtin();
        let mut store = ingest_examples(vec![src("ok", Domain::Teach, "make coffee")], &e, &cat).unwrap();
        let mut bad = src("broken", Domain::Teach, "slice bread");
        bad.program_text = "a = InteractionObject('Apple'\n".into();
        let err = store.ingest(vec![src("fine", Domain::Tidy, "tidy"), bad], &e, &cat).unwrap_err();
        assert!(matches!(err, MemoryError::Ingest { ref id, .. } if id == "broken"));
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn duplicate_ids_last_wins() {
        let e = HashedBagEmbedder::default();
        let store = ingest_examples(
            vec![src("x", Domain::Teach, "first"), src("x", Domain::Alfred, "second")],
            &e,
            &Catalog::builtin(),
        )
        .unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.records()[0].key_text, "second");
    }

    #[test]
    fn dimension_mismatch_is_store_error() {
        let cat = Catalog::builtin();
        let mut a = src("a", Domain::Teach, "one");
        a.embedding = Some(Embedding::new(vec![1.0, 0.0]).unwrap());
        let mut b = src("b", Domain::Teach, "two");
        b.embedding = Some(Embedding::new(vec![1.0, 0.0, 0.0]).unwrap());
        let err = ingest_examples(vec![a, b], &HashedBagEmbedder::default(), &cat).unwrap_err();
        assert_eq!(err, MemoryError::Dimension { expected: 2, got: 3 });
    }

    #[test]
    fn ties_break_by_id() {
        let cat = Catalog::builtin();
        let e = HashedBagEmbedder::default();
        let store = ingest_examples(
            vec![src("b", Domain::Teach, "same words"), src("a", Domain::Teach, "same words")],
            &e,
            &cat,
        )
        .unwrap();
        let out = retrieve_top_k("same words", &store, &RetrievalConfig::default(), None, &e).unwrap();
        let ids: Vec<_> = out.iter().map(|r| r.record.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn k_is_clamped_to_candidates() {
        let cat = Catalog::builtin();
        let e = HashedBagEmbedder::default();
        let store = ingest_examples(vec![src("a", Domain::Teach, "x"), src("b", Domain::Alfred, "y")], &e, &cat)
            .unwrap();
        let cfg = RetrievalConfig { k: 5, ..RetrievalConfig::default() };
        assert_eq!(retrieve_top_k("x", &store, &cfg, None, &e).unwrap().len(), 2);
        let cfg = RetrievalConfig { k: 5, mode: RetrievalMode::PromptRetrieval, ..cfg };
        assert_eq!(retrieve_top_k("x", &store, &cfg, Some(Domain::Alfred), &e).unwrap().len(), 1);
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(RetrievalConfig::new(0, RetrievalMode::SharedMemory).is_err());
    }
}
