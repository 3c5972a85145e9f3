//! Suite runner: loads assets, runs episodes in each mode and aggregates metrics.

mod prompts;
mod report;
mod run;
mod suite;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::executor::Budgets;
use crate::memory::{ExampleStore, HashedBagEmbedder, RetrievalConfig, RetrievalMode, TemplateStore};
use crate::simworld::{builtin_scene, parse_scene, World};
use crate::{Catalog, Domain};

pub use prompts::{retrieval_query, MemoryPrompts};
pub use report::{Aggregates, Comparison, ComparisonRow, EpisodeReport, SuiteReport, TidyAggregates};
pub use run::{compare_modes, episode_seed, expert_path_length, replay_file, run_suite, run_suite_with};
pub use suite::{
    builtin_suite, fetch_and_place, Episode, Suite, APPLE_FRIDGE, APPLE_MICROWAVE, EGG_MICROWAVE, SUITES, TWO_BOWLS,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HarnessError {
    #[error("asset error: {0}")]
    Asset(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("episode `{episode}`: {message}")]
    Episode { episode: String, message: String },
    #[error("backend error: {0}")]
    Backend(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Remote,
    Scripted,
    RetrievalEcho,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remote" => Ok(Self::Remote),
            "scripted" => Ok(Self::Scripted),
            "retrieval-echo" | "echo" => Ok(Self::RetrievalEcho),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// Parses `p`/`s` or the full retrieval mode names.
pub fn parse_mode(s: &str) -> Result<RetrievalMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "p" | "p_variant" | "prompt" | "prompt_retrieval" | "prompt-retrieval" => Ok(RetrievalMode::PromptRetrieval),
        "s" | "s_variant" | "shared" | "shared_memory" | "shared-memory" => Ok(RetrievalMode::SharedMemory),
        other => Err(format!("unknown mode `{other}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: RetrievalMode,
    pub backend: BackendKind,
    pub qa_enabled: bool,
    pub k: usize,
    pub budgets: Budgets,
    pub seed: u64,
    /// A builtin suite name or a path to a suite JSON file.
    pub suite: String,
    /// Restricts example memory to these domains.
    #[serde(default)]
    pub memory_domains: Option<Vec<Domain>>,
    pub preconditions: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub memory: Option<PathBuf>,
    #[serde(default)]
    pub templates: Option<PathBuf>,
    #[serde(default)]
    pub scenes: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(suite: &str, backend: BackendKind) -> Self {
        Self {
            mode: RetrievalMode::PromptRetrieval,
            backend,
            qa_enabled: false,
            k: RetrievalConfig::DEFAULT_K,
            budgets: Budgets::default(),
            seed: 0,
            suite: suite.to_string(),
            memory_domains: None,
            preconditions: true,
            out: None,
            memory: None,
            templates: None,
            scenes: None,
        }
    }

    pub fn retrieval(&self) -> Result<RetrievalConfig, HarnessError> {
        RetrievalConfig::new(self.k, self.mode).map_err(|e| HarnessError::Asset(e.to_string()))
    }
}

/// Everything loaded once per run and shared read-only by episodes.
pub struct Assets {
    pub catalog: Catalog,
    pub embedder: HashedBagEmbedder,
    pub examples: ExampleStore,
    pub templates: TemplateStore,
    pub scenes: BTreeMap<String, World>,
    pub suite: Suite,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Asset(format!("{}: {e}", path.display())))
}

fn asset<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Asset(e.to_string())
}

impl Assets {
    /// Loads and cross-checks every asset the run refers to.
    pub fn load(cfg: &RunConfig) -> Result<Self, HarnessError> {
        let catalog = Catalog::builtin();
        let embedder = HashedBagEmbedder::default();
        let full = match &cfg.memory {
            Some(path) => {
                let sources = ExampleStore::parse_sources(&read(path)?).map_err(asset)?;
                crate::memory::ingest_examples(sources, &embedder, &catalog).map_err(asset)?
            }
            None => ExampleStore::builtin(&embedder, &catalog).map_err(asset)?,
        };
        let templates = match &cfg.templates {
            Some(dir) => TemplateStore::load_dir(dir, &embedder, &full).map_err(asset)?,
            None => TemplateStore::builtin(&embedder, &full).map_err(asset)?,
        };
        let examples = match &cfg.memory_domains {
            Some(domains) => full.filtered(domains),
            None => full,
        };
        let suite = load_suite(&cfg.suite)?;
        let mut scenes = BTreeMap::new();
        for ep in &suite.episodes {
            if scenes.contains_key(&ep.scene) {
                continue;
            }
            let world = match &cfg.scenes {
                Some(dir) => parse_scene(&read(&dir.join(format!("{}.scene", ep.scene)))?, &catalog).map_err(asset)?,
                None => builtin_scene(&ep.scene, &catalog).map_err(asset)?,
            };
            scenes.insert(ep.scene.clone(), world);
        }
        for ep in &suite.episodes {
            check_episode(ep, &scenes[&ep.scene])?;
        }
        Ok(Self { catalog, embedder, examples, templates, scenes, suite })
    }
}

fn load_suite(name: &str) -> Result<Suite, HarnessError> {
    if let Some(s) = builtin_suite(name) {
        return Ok(s);
    }
    let path = Path::new(name);
    if path.is_file() {
        return serde_json::from_str(&read(path)?).map_err(asset);
    }
    Err(HarnessError::UnknownSuite(name.to_string()))
}

fn check_episode(ep: &Episode, world: &World) -> Result<(), HarnessError> {
    let bad = |message: String| HarnessError::Episode { episode: ep.id.clone(), message };
    if ep.goals.is_empty() {
        return Err(bad("no goal conditions".into()));
    }
    for id in ep.visits.iter().chain(ep.moves.iter().flat_map(|(a, b)| [a, b])) {
        if world.object(id).is_none() {
            return Err(bad(format!("unknown object `{id}` in scene `{}`", ep.scene)));
        }
    }
    Ok(())
}
