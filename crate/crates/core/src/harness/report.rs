use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunConfig;
use crate::executor::EpisodeStatus;
use crate::simworld::MetricsReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub episode_id: String,
    pub scene: String,
    pub status: EpisodeStatus,
    pub metrics: MetricsReport,
    pub replans: u32,
    pub questions: u32,
    pub final_hash: String,
    /// SHA-256 of the episode log in JSON lines.
    pub log_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyAggregates {
    pub correctly_moved: f64,
    pub incorrectly_moved: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub episodes: usize,
    pub success_rate: f64,
    pub goal_condition: f64,
    pub path_weighted_success: f64,
    pub path_weighted_goal_condition: f64,
    pub mean_steps: f64,
    pub mean_api_failures: f64,
    pub tidy: Option<TidyAggregates>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl Aggregates {
    pub fn from_episodes(episodes: &[EpisodeReport]) -> Self {
        let m = || episodes.iter().map(|e| &e.metrics);
        let tidy: Vec<_> = m().filter_map(|r| r.tidy.as_ref()).collect();
        Self {
            episodes: episodes.len(),
            success_rate: mean(m().map(|r| r.success)),
            goal_condition: mean(m().map(|r| r.goal_condition)),
            path_weighted_success: mean(m().map(|r| r.path_weighted_success)),
            path_weighted_goal_condition: mean(m().map(|r| r.path_weighted_goal_condition)),
            mean_steps: mean(m().map(|r| f64::from(r.steps))),
            mean_api_failures: mean(m().map(|r| f64::from(r.api_failures))),
            tidy: (!tidy.is_empty()).then(|| TidyAggregates {
                correctly_moved: mean(tidy.iter().map(|t| f64::from(t.correctly_moved))),
                incorrectly_moved: mean(tidy.iter().map(|t| f64::from(t.incorrectly_moved))),
                energy: mean(tidy.iter().map(|t| t.energy)),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: RunConfig,
    pub episodes: Vec<EpisodeReport>,
    pub aggregates: Aggregates,
    /// SHA-256 over the canonical JSON of everything above.
    pub content_hash: String,
}

impl SuiteReport {
    pub fn new(suite: String, config: RunConfig, episodes: Vec<EpisodeReport>) -> Self {
        let aggregates = Aggregates::from_episodes(&episodes);
        let mut report = Self { suite, config, episodes, aggregates, content_hash: String::new() };
        report.content_hash = report.compute_hash();
        report
    }

    pub fn compute_hash(&self) -> String {
        let body = serde_json::json!({
            "suite": self.suite,
            "config": self.config,
            "episodes": self.episodes,
            "aggregates": self.aggregates,
        });
        hex::encode(Sha256::digest(body.to_string().as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "suite {} | mode {:?} | backend {:?} | qa {} | k {} | seed {}",
            self.suite, c.mode, c.backend, c.qa_enabled, c.k, c.seed
        );
        let _ = writeln!(
            out,
            "{:<22} {:<15} {:>4} {:>5} {:>6} {:>6} {:>6} {:>5} {:>5}",
            "episode", "status", "SR", "GC", "PLW-SR", "PLW-GC", "steps", "fail", "qa"
        );
        for e in &self.episodes {
            let m = &e.metrics;
            let _ = writeln!(
                out,
                "{:<22} {:<15} {:>4.0} {:>5.2} {:>6.2} {:>6.2} {:>6} {:>5} {:>5}",
                e.episode_id,
                format!("{:?}", e.status),
                m.success,
                m.goal_condition,
                m.path_weighted_success,
                m.path_weighted_goal_condition,
                m.steps,
                m.api_failures,
                e.questions
            );
        }
        let a = &self.aggregates;
        let _ = writeln!(
            out,
            "{:<22} {:<15} {:>4.2} {:>5.2} {:>6.2} {:>6.2} {:>6.1} {:>5.1}",
            "mean", "", a.success_rate, a.goal_condition, a.path_weighted_success, a.path_weighted_goal_condition, a.mean_steps, a.mean_api_failures
        );
        if let Some(t) = &a.tidy {
            let _ = writeln!(out, "tidy: CM {:.2} | IM {:.2} | Energy {:.1}%", t.correctly_moved, t.incorrectly_moved, t.energy);
        }
        let _ = writeln!(out, "hash {}", self.content_hash);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub success_rate: f64,
    pub goal_condition: f64,
    pub content_hash: String,
}

impl ComparisonRow {
    pub fn of(label: &str, report: &SuiteReport) -> Self {
        Self {
            label: label.to_string(),
            success_rate: report.aggregates.success_rate,
            goal_condition: report.aggregates.goal_condition,
            content_hash: report.content_hash.clone(),
        }
    }
}

/// Mode comparison plus in-domain against wrong-domain memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub suite: String,
    pub modes: Vec<ComparisonRow>,
    pub cross_domain: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, label: &str) -> Option<&ComparisonRow> {
        self.modes.iter().chain(&self.cross_domain).find(|r| r.label == label)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}", self.suite);
        for (title, rows) in [("mode", &self.modes), ("memory", &self.cross_domain)] {
            let _ = writeln!(out, "{:<28} {:>6} {:>6}", title, "SR", "GC");
            for r in rows {
                let _ = writeln!(out, "{:<28} {:>6.2} {:>6.2}", r.label, r.success_rate, r.goal_condition);
            }
        }
        out
    }
}
