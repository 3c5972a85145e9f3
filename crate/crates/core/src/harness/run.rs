use std::collections::VecDeque;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::report::{Comparison, ComparisonRow, EpisodeReport, SuiteReport};
use super::{Assets, BackendKind, Episode, HarnessError, MemoryPrompts, RunConfig};
use crate::executor::{run_episode, EpisodeLog, ExecConfig, QaPolicy, ReplayVerdict, Services};
use crate::memory::RetrievalMode;
use crate::planner::{PlannerBackend, RemoteBackend, RetrievalEchoBackend, ScriptedBackend};
use crate::simworld::{evaluate, evaluate_tidy, MessyConfig, Oracle, PlacementPrior, TaskSpec, World};
use crate::spatial::{Cell, SpatialState};
use crate::Domain;

/// Per-episode seed derived from the run seed and the episode id.
pub fn episode_seed(seed: u64, episode_id: &str) -> u64 {
    let digest = Sha256::new().chain_update(seed.to_le_bytes()).chain_update(episode_id.as_bytes()).finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn bfs(world: &World, start: Cell, goals: &[Cell]) -> Option<(u32, Cell)> {
    let (rows, cols) = (world.rows(), world.cols());
    let mut dist = vec![u32::MAX; rows * cols];
    let mut queue = VecDeque::from([start]);
    dist[start.0 * cols + start.1] = 0;
    while let Some((r, c)) = queue.pop_front() {
        let d = dist[r * cols + c];
        if goals.contains(&(r, c)) {
            return Some((d, (r, c)));
        }
        let next = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
        for (nr, nc) in next {
            if nr < rows && nc < cols && world.is_walkable((nr, nc)) && dist[nr * cols + nc] == u32::MAX {
                dist[nr * cols + nc] = d + 1;
                queue.push_back((nr, nc));
            }
        }
    }
    None
}

/// Translations an expert needs to stand next to each visited object in turn.
pub fn expert_path_length(world: &World, visits: &[String]) -> u32 {
    let mut at = world.agent.cell();
    let mut total = 0;
    for id in visits {
        let Some(furniture) = world.root_furniture(id) else { continue };
        let Some(pos) = world.position(&furniture.id) else { continue };
        let cell = ((pos[2] / world.cell_size) as usize, (pos[0] / world.cell_size) as usize);
        let goals: Vec<Cell> = [(cell.0.wrapping_sub(1), cell.1), (cell.0 + 1, cell.1), (cell.0, cell.1.wrapping_sub(1)), (cell.0, cell.1 + 1)]
            .into_iter()
            .filter(|&g| g.0 < world.rows() && g.1 < world.cols() && world.is_walkable(g))
            .collect();
        if let Some((d, reached)) = bfs(world, at, &goals) {
            total += d;
            at = reached;
        }
    }
    total.max(1)
}

fn backend_for(cfg: &RunConfig, assets: &Assets, ep: &Episode) -> Result<Box<dyn PlannerBackend>, HarnessError> {
    Ok(match cfg.backend {
        BackendKind::Scripted => {
            Box::new(ScriptedBackend::new(assets.catalog.clone()).with_programs(&ep.command, ep.programs.clone()))
        }
        BackendKind::RetrievalEcho => Box::new(RetrievalEchoBackend::new(&assets.examples, assets.catalog.clone())),
        BackendKind::Remote => Box::new(RemoteBackend::from_env().map_err(|e| HarnessError::Backend(e.to_string()))?),
    })
}

fn run_one(cfg: &RunConfig, assets: &Assets, prior: &PlacementPrior, ep: &Episode) -> Result<(EpisodeReport, EpisodeLog), HarnessError> {
    let fail = |message: String| HarnessError::Episode { episode: ep.id.clone(), message };
    let scene = &assets.scenes[&ep.scene];
    let moves: Vec<(&str, &str)> = ep.moves.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let messy = MessyConfig::from_moves(scene, &moves, prior.clone()).map_err(|e| fail(e.to_string()))?;
    let start = messy.apply(scene).map_err(|e| fail(e.to_string()))?;
    let mut world = start.clone();
    let mut spatial = SpatialState::new(world.rows(), world.cols(), world.cell_size);
    let backend = backend_for(cfg, assets, ep)?;
    let prompts = MemoryPrompts::new(&assets.embedder, &assets.examples, &assets.templates, cfg.retrieval()?, &assets.catalog);
    let oracle = Oracle::new();
    let services = Services { backend: backend.as_ref(), prompts: &prompts, oracle: &oracle, catalog: &assets.catalog };
    let exec = ExecConfig {
        budgets: cfg.budgets,
        qa: if cfg.qa_enabled { QaPolicy::enabled() } else { QaPolicy::disabled() },
        preconditions: cfg.preconditions,
        seed: episode_seed(cfg.seed, &ep.id),
        ..ExecConfig::default()
    };
    let result = run_episode(&ep.id, &ep.command, &mut world, &mut spatial, services, &exec);
    let expert = expert_path_length(&start, &ep.visits);
    let task = TaskSpec::new(&ep.id, ep.domain, ep.goals.clone(), expert).map_err(|e| fail(e.to_string()))?;
    let mut metrics = evaluate(&world, &task, &world.stats);
    if ep.tidy {
        metrics.tidy = Some(evaluate_tidy(&start, &world, &messy, &world.stats).map_err(|e| fail(e.to_string()))?);
    }
    let log_digest = hex::encode(Sha256::digest(result.log.to_jsonl().as_bytes()));
    let report = EpisodeReport {
        episode_id: ep.id.clone(),
        scene: ep.scene.clone(),
        status: result.state.status,
        metrics,
        replans: result.state.replans_used,
        questions: result.state.qa_budget_used,
        final_hash: result.final_hash,
        log_digest,
    };
    Ok((report, result.log))
}

fn io<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Io(e.to_string())
}

/// Loads assets, then runs every episode of the configured suite.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport, HarnessError> {
    let assets = Assets::load(cfg)?;
    run_suite_with(cfg, &assets)
}

/// Runs with already loaded assets. Episodes run in parallel and are
/// reported in suite order.
pub fn run_suite_with(cfg: &RunConfig, assets: &Assets) -> Result<SuiteReport, HarnessError> {
    if cfg.backend == BackendKind::Remote {
        RemoteBackend::from_env().map_err(|e| HarnessError::Backend(e.to_string()))?;
    }
    cfg.retrieval()?;
    let prior = PlacementPrior::builtin(&assets.catalog).map_err(|e| HarnessError::Asset(e.to_string()))?;
    let outcomes: Vec<(EpisodeReport, EpisodeLog)> =
        assets.suite.episodes.par_iter().map(|ep| run_one(cfg, assets, &prior, ep)).collect::<Result<_, _>>()?;
    let report = SuiteReport::new(assets.suite.id.clone(), cfg.clone(), outcomes.iter().map(|(r, _)| r.clone()).collect());
    if let Some(out) = &cfg.out {
        let logs = out.join("logs");
        std::fs::create_dir_all(&logs).map_err(io)?;
        for (r, log) in &outcomes {
            std::fs::write(logs.join(format!("{}.jsonl", r.episode_id)), log.to_jsonl()).map_err(io)?;
        }
        std::fs::write(out.join("report.json"), report.to_json()).map_err(io)?;
        std::fs::write(out.join("report.txt"), report.to_table()).map_err(io)?;
    }
    Ok(report)
}

/// Re-steps the world recorded in a log file.
pub fn replay_file(path: &Path) -> Result<ReplayVerdict, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(io)?;
    let log = EpisodeLog::parse_jsonl(&text).map_err(io)?;
    log.replay().map_err(io)
}

/// Runs both retrieval modes, then in-domain memory against memory holding
/// only `wrong_domain` examples.
pub fn compare_modes(cfg: &RunConfig, wrong_domain: Domain) -> Result<Comparison, HarnessError> {
    let run = |mode: RetrievalMode, domains: Option<Vec<Domain>>| {
        let mut c = cfg.clone();
        c.mode = mode;
        c.memory_domains = domains;
        c.out = None;
        run_suite(&c)
    };
    let p = run(RetrievalMode::PromptRetrieval, None)?;
    let s = run(RetrievalMode::SharedMemory, None)?;
    let wrong = run(RetrievalMode::SharedMemory, Some(vec![wrong_domain]))?;
    Ok(Comparison {
        suite: p.suite.clone(),
        modes: vec![ComparisonRow::of("P_VARIANT", &p), ComparisonRow::of("S_VARIANT", &s)],
        cross_domain: vec![
            ComparisonRow::of("in-domain", &p),
            ComparisonRow::of(&format!("{wrong_domain}-only"), &wrong),
            ComparisonRow::of("shared", &s),
        ],
    })
}
