use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EmbedError {
    #[error("embedding has non-finite entries")]
    NonFinite,
    #[error("embedding has zero dimension")]
    Empty,
    #[error("embedding request failed: {0}")]
    Transport(String),
    #[error("malformed embedding response: {0}")]
    Malformed(String),
    #[error("missing configuration: {0}")]
    Config(String),
}

/// Fixed-length real vector. All entries finite, length > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self, EmbedError> {
        if values.is_empty() {
            return Err(EmbedError::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn euclidean(&self, other: &Embedding) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `1 - cos(a, b)`; a zero vector is treated as orthogonal to everything.
    pub fn cosine_distance(&self, other: &Embedding) -> f64 {
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        let na = self.0.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb = other.0.iter().map(|b| b * b).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            1.0
        } else {
            1.0 - dot / (na * nb)
        }
    }
}

impl TryFrom<Vec<f64>> for Embedding {
    type Error = EmbedError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Embedding::new(values)
    }
}

impl From<Embedding> for Vec<f64> {
    fn from(e: Embedding) -> Self {
        e.0
    }
}

/// Text → embedding provider.
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Embedding, EmbedError>;
}

/// Deterministic offline embedder: signed feature hashing of lower-cased word
/// tokens (stop words dropped, sublinear term frequency) into a fixed number
/// of buckets, L2-normalised.
#[derive(Debug, Clone)]
pub struct HashedBagEmbedder {
    dim: usize,
}

const STOP_WORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "i", "in", "is", "it", "its",
    "of", "on", "or", "that", "the", "then", "this", "to", "with", "you", "your",
];

impl HashedBagEmbedder {
    pub const DEFAULT_DIM: usize = 256;

    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self { dim }
    }

    pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(|t| !STOP_WORDS.contains(&t.as_str()))
    }
}

impl Default for HashedBagEmbedder {
    fn default() -> Self {
        Self::new(Self::DEFAULT_DIM)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

impl Embedder for HashedBagEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Embedding, EmbedError> {
        let mut counts: std::collections::BTreeMap<String, u32> = Default::default();
        for tok in Self::tokens(text) {
            *counts.entry(tok).or_default() += 1;
        }
        let mut values = vec![0.0; self.dim];
        for (tok, tf) in counts {
            let h = fnv1a(tok.as_bytes());
            let bucket = (h % self.dim as u64) as usize;
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            values[bucket] += sign * (1.0 + f64::from(tf).ln());
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        Embedding::new(values)
    }
}

/// Hosted embedding endpoint speaking the common `/embeddings` JSON contract:
/// request `{"model", "input"}`, response `{"data": [{"embedding": [...]}]}`.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    pub endpoint: String,
    pub model: String,
    pub api_key: String,
    pub dim: usize,
    pub timeout: Duration,
}

impl RemoteEmbedder {
    pub const ENDPOINT_VAR: &'static str = "MNEMO_EMBED_ENDPOINT";
    pub const MODEL_VAR: &'static str = "MNEMO_EMBED_MODEL";
    pub const KEY_VAR: &'static str = "MNEMO_API_KEY";

    pub fn from_env(dim: usize) -> Result<Self, EmbedError> {
        let var = |name: &str| std::env::var(name).map_err(|_| EmbedError::Config(name.to_string()));
        Ok(Self {
            endpoint: var(Self::ENDPOINT_VAR)?,
            model: std::env::var(Self::MODEL_VAR).unwrap_or_else(|_| "text-embedding-ada-002".into()),
            api_key: var(Self::KEY_VAR)?,
            dim,
            timeout: Duration::from_secs(30),
        })
    }
}

impl Embedder for RemoteEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Embedding, EmbedError> {
        let body = serde_json::json!({ "model": self.model, "input": text });
        let response = ureq::post(&self.endpoint)
            .timeout(self.timeout)
            .set("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(body)
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        let json: serde_json::Value =
            response.into_json().map_err(|e| EmbedError::Malformed(e.to_string()))?;
        let values: Vec<f64> = json["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| EmbedError::Malformed("missing data[0].embedding".into()))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| EmbedError::Malformed("non-numeric entry".into())))
            .collect::<Result<_, _>>()?;
        if values.len() != self.dim {
            return Err(EmbedError::Malformed(format!(
                "expected {} dimensions, got {}",
                self.dim,
                values.len()
            )));
        }
        Embedding::new(values)
    }
}
