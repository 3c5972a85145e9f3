use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    known_instances, resolve_object, EpisodeLog, EpisodeState, EpisodeStatus, ExecConfig,
    FailureFeedback, LogEvent, PromptSource, Resolution, LANDMARK_RADIUS, PUT_DOWN_SURFACES,
};
use crate::assets;
use crate::catalog::{Capability, Catalog};
use crate::dsl::{parse_plan, parse_qa_script, validate_plan, Direction, ObjectBinding, PlanProgram, QaCall, Severity, Statement};
use crate::dsl::Method;
use crate::planner::{PlannerBackend, PlannerRequest};
use crate::prompt::{assemble_answer_prompt, assemble_question_prompt, builtin_answer_template, builtin_question_template};
use crate::simworld::{Action, Oracle, StepResult, World, INTERACTION_RANGE};
use crate::spatial::{plan_path_to_any, rotations, sample_exploration_goal, Cell, Frame, NavAction, SpatialState};

/// Shared, read-only collaborators of an episode.
#[derive(Clone, Copy)]
pub struct Services<'a> {
    pub backend: &'a dyn PlannerBackend,
    pub prompts: &'a dyn PromptSource,
    pub oracle: &'a Oracle,
    pub catalog: &'a Catalog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub episode_id: String,
    pub state: EpisodeState,
    pub log: EpisodeLog,
    pub final_hash: String,
}

enum Stop {
    Budget,
    Failed(FailureFeedback),
}

type Flow<T> = Result<T, Stop>;

const PITCH_SWEEP: [i32; 4] = [30, 0, 60, -30];
const NAV_RETRIES: usize = 30;
const STAND_RADIUS: f64 = 0.5;
const WIDE_STAND_RADIUS: f64 = 1.0;

pub struct Executor<'a> {
    world: &'a mut World,
    spatial: &'a mut SpatialState,
    svc: Services<'a>,
    cfg: ExecConfig,
    state: EpisodeState,
    log: EpisodeLog,
    frame: Frame,
    bindings: BTreeMap<String, String>,
    asked: BTreeSet<String>,
    explore_round: u64,
    action_index: u32,
    landmark_hint: Option<String>,
}

/// Runs one instruction to completion on a fresh executor.
pub fn run_episode(
    episode_id: &str,
    command: &str,
    world: &mut World,
    spatial: &mut SpatialState,
    svc: Services<'_>,
    cfg: &ExecConfig,
) -> EpisodeResult {
    Executor::new(world, spatial, svc, *cfg).run(episode_id, command)
}

fn failed(action: impl Into<String>, reason: impl Into<String>) -> Stop {
    Stop::Failed(FailureFeedback::new(action, reason))
}

fn horizontal(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).hypot(a[2] - b[2])
}

impl<'a> Executor<'a> {
    pub fn new(world: &'a mut World, spatial: &'a mut SpatialState, svc: Services<'a>, cfg: ExecConfig) -> Self {
        let frame = world.render();
        Self {
            world,
            spatial,
            svc,
            cfg,
            state: EpisodeState::default(),
            log: EpisodeLog::default(),
            frame,
            bindings: BTreeMap::new(),
            asked: BTreeSet::new(),
            explore_round: 0,
            action_index: 0,
            landmark_hint: None,
        }
    }

    pub fn run(mut self, episode_id: &str, command: &str) -> EpisodeResult {
        self.log.push(LogEvent::Start {
            episode_id: episode_id.to_string(),
            command: command.to_string(),
            world: Box::new(self.world.clone()),
        });
        self.observe();
        let status = match self.look_around() {
            Err(Stop::Budget) => EpisodeStatus::FailureBudget,
            _ => self.plan_loop(command),
        };
        self.state.status = status;
        let final_hash = self.world.state_hash();
        self.log.push(LogEvent::End {
            status,
            steps: self.state.steps_taken,
            api_failures: self.state.api_failures,
            final_hash: final_hash.clone(),
        });
        EpisodeResult { episode_id: episode_id.to_string(), state: self.state, log: self.log, final_hash }
    }

    fn plan_loop(&mut self, command: &str) -> EpisodeStatus {
        let mut current = command.trim().to_string();
        let mut attempt = 0;
        loop {
            match self.attempt(attempt, &current) {
                Ok(()) => return EpisodeStatus::Success,
                Err(Stop::Budget) => return EpisodeStatus::FailureBudget,
                Err(Stop::Failed(fb)) => {
                    if self.state.replans_used >= self.cfg.budgets.max_replans {
                        return EpisodeStatus::FailurePlan;
                    }
                    self.state.replans_used += 1;
                    attempt += 1;
                    let sentence = fb.sentence();
                    self.log.push(LogEvent::Feedback { sentence: sentence.clone() });
                    current = format!("{} {}", command.trim(), sentence);
                }
            }
        }
    }

    fn attempt(&mut self, attempt: u32, command: &str) -> Flow<()> {
        let prompt = self.svc.prompts.plan_prompt(command).map_err(|e| failed("planning", e))?;
        let example_ids = prompt.example_ids.clone();
        let response = self
            .svc
            .backend
            .generate(&PlannerRequest::greedy(prompt))
            .map_err(|e| failed("planning", e.to_string()))?;
        self.log.push(LogEvent::Plan {
            attempt,
            command: command.to_string(),
            backend_id: response.backend_id.clone(),
            example_ids,
            program_text: response.program_text.clone(),
        });
        let program = match parse_plan(&response.program_text, self.svc.catalog) {
            Ok(p) => p,
            Err(e) => return Err(self.reject(attempt, format!("the plan does not parse ({e})"))),
        };
        let violations = validate_plan(&program, self.svc.catalog.affordances());
        if let Some(v) = violations.iter().find(|v| v.severity == Severity::Error) {
            return Err(self.reject(attempt, format!("the plan is invalid ({})", v.message)));
        }
        self.bindings.clear();
        for stmt in &program.statements {
            self.run_statement(&program, stmt)?;
        }
        Ok(())
    }

    fn reject(&mut self, attempt: u32, reason: String) -> Stop {
        self.log.push(LogEvent::PlanRejected { attempt, reason: reason.clone() });
        failed("checking the plan", reason)
    }

    // ---- perception and primitive actions ----

    fn observe(&mut self) {
        let frame = self.world.render();
        let pose = self.world.agent_pose();
        let cam = self.world.camera;
        // Frames come from the simulator with matching shapes.
        let _ = self.spatial.integrate(&frame, &pose, &cam);
        self.spatial.map.add_free(self.world.agent.cell());
        self.frame = frame;
    }

    fn sync(&mut self) {
        self.state.steps_taken = self.world.stats.steps;
        self.state.api_failures = self.world.stats.api_failures;
        self.state.held_object = self.world.held.clone();
    }

    fn category_of(&self, id: &str) -> String {
        self.world.object(id).map(|o| o.category.clone()).unwrap_or_else(|| id.to_string())
    }

    fn describe(&self, action: &Action) -> String {
        match action.target() {
            Some(t) => format!("{} {}", action.name(), self.category_of(t)),
            None => action.name().to_string(),
        }
    }

    fn act(&mut self, action: Action) -> Flow<StepResult> {
        let b = self.cfg.budgets;
        if self.world.stats.steps >= b.max_steps || self.world.stats.api_failures >= b.max_api_failures {
            return Err(Stop::Budget);
        }
        if let (Action::Pickup(_), Some(h)) = (&action, &self.world.held) {
            let reason = format!("the hand already holds the {}", self.category_of(h));
            return Err(failed(self.describe(&action), reason));
        }
        let result = self.world.step(&action);
        self.log.push(LogEvent::Action {
            index: self.action_index,
            action,
            success: result.success,
            reason: result.reason.clone(),
        });
        self.action_index += 1;
        self.sync();
        self.observe();
        Ok(result)
    }

    fn interact(&mut self, action: Action) -> Flow<()> {
        let what = self.describe(&action);
        let result = self.act(action)?;
        if result.success {
            self.refresh_positions();
            Ok(())
        } else {
            let reason = result.reason.unwrap_or_else(|| "the action failed".into());
            Err(Stop::Failed(FailureFeedback::new(what, reason).with_search(self.landmark_hint.clone())))
        }
    }

    /// Moves remembered centroids of bound objects to where they now are.
    fn refresh_positions(&mut self) {
        let ids: Vec<String> = self.bindings.values().cloned().collect();
        for id in ids {
            if self.world.held.as_deref() == Some(id.as_str()) {
                continue;
            }
            if let (Some(idx), Some(pos)) = (self.spatial.memory.by_instance(&id), self.world.position(&id)) {
                self.spatial.memory.set_centroid(idx, pos);
            }
        }
    }

    fn nav(&mut self, a: NavAction) -> Flow<bool> {
        let action = match a {
            NavAction::MoveAhead => Action::MoveAhead,
            NavAction::RotateLeft => Action::RotateLeft,
            NavAction::RotateRight => Action::RotateRight,
        };
        let ok = self.act(action)?.success;
        if !ok && a == NavAction::MoveAhead {
            if let Some(ahead) = self.cell_in_direction(self.world.agent.yaw) {
                self.spatial.map.add_obstacle(ahead);
            }
        }
        Ok(ok)
    }

    fn cell_in_direction(&self, yaw: u32) -> Option<Cell> {
        let (r, c) = self.world.agent.cell();
        let cell = match yaw % 360 {
            0 => (r + 1, c),
            90 => (r, c + 1),
            180 => (r.checked_sub(1)?, c),
            _ => (r, c.checked_sub(1)?),
        };
        self.spatial.map.contains(cell).then_some(cell)
    }

    fn look_around(&mut self) -> Flow<()> {
        for _ in 0..4 {
            self.nav(NavAction::RotateRight)?;
        }
        Ok(())
    }

    fn set_pitch(&mut self, target: i32) -> Flow<()> {
        while self.world.agent.pitch < target {
            if !self.act(Action::LookDown)?.success {
                break;
            }
        }
        while self.world.agent.pitch > target {
            if !self.act(Action::LookUp)?.success {
                break;
            }
        }
        Ok(())
    }

    fn turn_to(&mut self, yaw: u32) -> Flow<()> {
        for a in rotations(self.world.agent.yaw, yaw) {
            self.nav(a)?;
        }
        Ok(())
    }

    fn face_point(&mut self, p: [f64; 3]) -> Flow<()> {
        let me = self.world.agent_pose().position;
        let (dx, dz) = (p[0] - me[0], p[2] - me[2]);
        let yaw = if dx.abs() > dz.abs() {
            if dx > 0.0 { 90 } else { 270 }
        } else if dz >= 0.0 {
            0
        } else {
            180
        };
        self.turn_to(yaw)
    }

    fn navigate_to(&mut self, goals: &[Cell]) -> Flow<bool> {
        for _ in 0..NAV_RETRIES {
            let start = self.world.agent.cell();
            if goals.contains(&start) {
                return Ok(true);
            }
            let path = match plan_path_to_any(&self.spatial.map, start, goals, self.world.agent.yaw) {
                Ok(Some(p)) => p,
                _ => return Ok(false),
            };
            let mut blocked = false;
            for a in path.to_actions(self.world.agent.yaw) {
                if !self.nav(a)? {
                    blocked = true;
                    break;
                }
            }
            if !blocked {
                return Ok(goals.contains(&self.world.agent.cell()));
            }
        }
        Ok(false)
    }

    /// Free cells facing the object's cell, else free cells within `radius`.
    fn stand_cells(&self, p: [f64; 3], radius: f64) -> Vec<Cell> {
        let map = &self.spatial.map;
        if let Some(target) = map.cell_of(p[0], p[2]) {
            let adjacent: Vec<Cell> = map.neighbours(target).filter(|&c| map.is_free(c)).collect();
            if !adjacent.is_empty() && radius <= STAND_RADIUS {
                return adjacent;
            }
        }
        map.cells()
            .filter(|&c| map.is_free(c))
            .filter(|&c| {
                let (x, z) = map.center(c);
                (x - p[0]).hypot(z - p[2]) <= radius
            })
            .collect()
    }

    // ---- approaching objects ----

    fn centroid(&self, id: &str) -> Option<[f64; 3]> {
        if self.world.held.as_deref() == Some(id) {
            return None;
        }
        self.spatial.memory.by_instance(id).and_then(|i| self.spatial.memory.get(i)).map(|e| e.centroid)
    }

    fn within_reach(&self, id: &str, c: [f64; 3]) -> bool {
        self.frame.shows(id) && horizontal(self.world.agent_pose().position, c) <= INTERACTION_RANGE - 0.1
    }

    /// Walks next to `id`, faces it and tilts until it is in view.
    fn approach(&mut self, id: &str) -> Flow<()> {
        let Some(c) = self.centroid(id) else { return Ok(()) };
        if self.within_reach(id, c) {
            return Ok(());
        }
        let mut reached = false;
        for radius in [STAND_RADIUS, WIDE_STAND_RADIUS] {
            let goals = self.stand_cells(c, radius);
            if !goals.is_empty() && self.navigate_to(&goals)? {
                reached = true;
                break;
            }
        }
        if !reached {
            return Err(Stop::Failed(
                FailureFeedback::new(format!("GoTo {}", self.category_of(id)), "no path to it was found")
                    .with_search(self.landmark_hint.clone()),
            ));
        }
        let c = self.centroid(id).unwrap_or(c);
        let aim = match self.spatial.map.cell_of(c[0], c[2]) {
            Some(cell) => {
                let (x, z) = self.spatial.map.center(cell);
                [x, c[1], z]
            }
            None => c,
        };
        self.face_point(aim)?;
        self.look_for(id)
    }

    fn look_for(&mut self, id: &str) -> Flow<()> {
        if self.frame.shows(id) {
            return Ok(());
        }
        for p in PITCH_SWEEP {
            if p == self.world.agent.pitch {
                continue;
            }
            self.set_pitch(p)?;
            if self.frame.shows(id) {
                return Ok(());
            }
        }
        Ok(())
    }

    // ---- finding objects ----

    fn excluded(&self, var: &str) -> Vec<String> {
        self.bindings.iter().filter(|(k, _)| k.as_str() != var).map(|(_, v)| v.clone()).collect()
    }

    fn nearest_known(&self, category: &str, exclude: &[String]) -> Option<String> {
        let me = self.world.agent_pose().position;
        known_instances(&self.spatial.memory, category, exclude)
            .into_iter()
            .filter(|(id, _)| self.world.held.as_deref() != Some(*id))
            .map(|(id, c)| (horizontal(me, c), id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
            .map(|(_, id)| id.to_string())
    }

    fn near_landmark(&self, category: &str, exclude: &[String], landmark_id: &str) -> Option<String> {
        let l = self.centroid(landmark_id)?;
        known_instances(&self.spatial.memory, category, exclude)
            .into_iter()
            .map(|(id, c)| (horizontal(l, c), id))
            .filter(|(d, _)| *d <= LANDMARK_RADIUS)
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
            .map(|(_, id)| id.to_string())
    }

    fn resolve_var(&mut self, program: &PlanProgram, var: &str) -> Flow<String> {
        if let Some(id) = self.bindings.get(var) {
            if self.world.held.as_deref() == Some(id.as_str()) || self.spatial.memory.by_instance(id).is_some() {
                return Ok(id.clone());
            }
        }
        let binding = program
            .binding(var)
            .cloned()
            .ok_or_else(|| failed("resolving objects", format!("`{var}` is not defined")))?;
        let id = self.find(&binding, true)?;
        self.bindings.insert(var.to_string(), id.clone());
        Ok(id)
    }

    /// Resolves a binding, searching and asking as needed.
    fn find(&mut self, binding: &ObjectBinding, allow_qa: bool) -> Flow<String> {
        let var = binding.var_name.as_str();
        let category = binding.category.as_str();
        let exclude = self.excluded(var);
        self.landmark_hint = binding.landmark.clone();
        let pickupable = self.svc.catalog.has(category, Capability::Pickupable);
        match resolve_object(binding, &self.spatial.memory, &exclude) {
            Resolution::Found(id) => return Ok(id),
            Resolution::Ambiguous(ids) => {
                if allow_qa && pickupable {
                    let context = format!("The agent has seen several {category} objects and does not know which one to use.");
                    if let Some(id) = self.ask(var, "ambiguous", category, &context, &exclude)? {
                        return Ok(id);
                    }
                }
                let me = self.world.agent_pose().position;
                let nearest = ids
                    .into_iter()
                    .filter_map(|id| self.centroid(&id).map(|c| (horizontal(me, c), id)))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
                    .map(|(_, id)| id);
                if let Some(id) = nearest {
                    return Ok(id);
                }
            }
            Resolution::NeedsSearch => {}
        }
        if let Some(landmark) = &binding.landmark {
            if let Some(id) = self.search_near(category, landmark, &exclude)? {
                return Ok(id);
            }
        }
        if allow_qa {
            let context = format!("The agent does not know where the {category} is.");
            if let Some(id) = self.ask(var, "unknown", category, &context, &exclude)? {
                return Ok(id);
            }
        }
        if let Some(id) = self.frontier_search(category, &exclude)? {
            return Ok(id);
        }
        Err(Stop::Failed(
            FailureFeedback::new(format!("searching for the {category}"), "it was not found anywhere")
                .with_search(binding.landmark.clone()),
        ))
    }

    fn find_category(&mut self, category: &str) -> Flow<String> {
        let binding = ObjectBinding {
            var_name: format!("_{category}"),
            category: category.to_string(),
            landmark: None,
            attributes: None,
        };
        self.find(&binding, false)
    }

    /// Visits remembered landmarks, opening containers and sweeping the view.
    fn search_near(&mut self, category: &str, landmark: &str, exclude: &[String]) -> Flow<Option<String>> {
        if known_instances(&self.spatial.memory, landmark, &[]).is_empty() {
            if let Some(id) = self.nearest_known(category, exclude) {
                return Ok(Some(id));
            }
            if self.frontier_search(landmark, &[])?.is_none() {
                return Ok(self.nearest_known(category, exclude));
            }
        }
        let pose = self.world.agent_pose();
        let (me, fwd) = (pose.position, pose.forward());
        let mut landmarks: Vec<(f64, String)> = known_instances(&self.spatial.memory, landmark, &[])
            .into_iter()
            .map(|(id, c)| {
                let behind = (c[0] - me[0]) * fwd[0] + (c[2] - me[2]) * fwd[2] < 0.0;
                (horizontal(me, c) + if behind { 100.0 } else { 0.0 }, id.to_string())
            })
            .collect();
        landmarks.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (_, lid) in landmarks.into_iter().take(4) {
            if let Some(id) = self.near_landmark(category, exclude, &lid) {
                return Ok(Some(id));
            }
            match self.approach(&lid) {
                Err(Stop::Budget) => return Err(Stop::Budget),
                Err(Stop::Failed(_)) => continue,
                Ok(()) => {}
            }
            let lstate = self.world.object(&lid).map(|o| o.state).unwrap_or_default();
            if self.cfg.preconditions && self.world.has(&lid, Capability::Openable) && !lstate.open {
                if lstate.on {
                    self.act(Action::ToggleOff(lid.clone()))?;
                }
                self.act(Action::Open(lid.clone()))?;
            }
            if let Some(id) = self.near_landmark(category, exclude, &lid) {
                return Ok(Some(id));
            }
            for p in [0, 60, 30] {
                self.set_pitch(p)?;
                if let Some(id) = self.near_landmark(category, exclude, &lid) {
                    return Ok(Some(id));
                }
            }
            for _ in 0..4 {
                self.nav(NavAction::RotateRight)?;
                if let Some(id) = self.near_landmark(category, exclude, &lid) {
                    return Ok(Some(id));
                }
            }
        }
        Ok(self.nearest_known(category, exclude))
    }

    /// Samples frontier goals until `category` is seen or the map is done.
    fn frontier_search(&mut self, category: &str, exclude: &[String]) -> Flow<Option<String>> {
        loop {
            if let Some(id) = self.nearest_known(category, exclude) {
                return Ok(Some(id));
            }
            let seed = self.cfg.seed.wrapping_add(self.explore_round);
            self.explore_round += 1;
            let origin = Some(self.world.agent.cell());
            let Some(goal) = sample_exploration_goal(&self.spatial.map, seed, origin, &self.cfg.explore) else {
                return Ok(None);
            };
            let map = &self.spatial.map;
            let mut stands: Vec<Cell> = map.neighbours(goal).filter(|&n| map.is_free(n)).collect();
            if map.is_free(goal) {
                stands.push(goal);
            }
            if !stands.is_empty() && self.navigate_to(&stands)? {
                let (x, z) = self.spatial.map.center(goal);
                if self.world.agent.cell() != goal {
                    self.face_point([x, 0.0, z])?;
                }
            }
            self.spatial.map.mark_explored(goal);
        }
    }

    /// Asks one question for a blocking condition and follows the parsed answer.
    fn ask(
        &mut self,
        var: &str,
        condition: &str,
        category: &str,
        context: &str,
        exclude: &[String],
    ) -> Flow<Option<String>> {
        let qa = self.cfg.qa;
        if !qa.enabled || self.state.qa_budget_used >= qa.max_questions {
            return Ok(None);
        }
        if !self.asked.insert(format!("{var}/{condition}")) {
            return Ok(None);
        }
        let classes = self.svc.catalog.class_list();
        let Ok(q_prompt) =
            assemble_question_prompt(&builtin_question_template(), context, assets::QUESTION_API, &classes)
        else {
            return Ok(None);
        };
        let Ok(q_text) = self.svc.backend.generate(&PlannerRequest::greedy(q_prompt)) else {
            return Ok(None);
        };
        let Some(question) = parse_qa_script(&q_text.program_text, self.svc.catalog)
            .ok()
            .and_then(|s| s.calls.into_iter().find(QaCall::is_question))
        else {
            return Ok(None);
        };
        let answer = self.svc.oracle.answer(self.world, &question);
        self.state.qa_budget_used += 1;
        let script = assemble_answer_prompt(
            &builtin_answer_template(),
            context,
            &question.to_string(),
            &answer,
            assets::SEARCH_API,
            &classes,
        )
        .ok()
        .and_then(|p| self.svc.backend.generate(&PlannerRequest::greedy(p)).ok())
        .map(|r| r.program_text)
        .unwrap_or_default();
        self.log.push(LogEvent::Question {
            context: context.to_string(),
            question: question.to_string(),
            answer,
            script: script.clone(),
        });
        let calls = parse_qa_script(&script, self.svc.catalog).map(|s| s.calls).unwrap_or_default();
        for call in calls {
            match call {
                QaCall::Turn { direction } => match direction {
                    Direction::Left => {
                        self.nav(NavAction::RotateLeft)?;
                    }
                    Direction::Right => {
                        self.nav(NavAction::RotateRight)?;
                    }
                    Direction::Backward => {
                        self.nav(NavAction::RotateRight)?;
                        self.nav(NavAction::RotateRight)?;
                    }
                    Direction::Forward => {}
                },
                QaCall::Move { direction } => {
                    let action = match direction {
                        Direction::Forward => Action::MoveAhead,
                        Direction::Backward => Action::MoveBack,
                        Direction::Left => Action::MoveLeft,
                        Direction::Right => Action::MoveRight,
                    };
                    self.act(action)?;
                }
                QaCall::SearchNearOtherObject { category: found_cat, landmark } => {
                    if found_cat == category {
                        if let Some(id) = self.search_near(category, &landmark, exclude)? {
                            return Ok(Some(id));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    }

    // ---- macros ----

    fn run_statement(&mut self, program: &PlanProgram, stmt: &Statement) -> Flow<()> {
        let receiver = self.resolve_var(program, &stmt.receiver)?;
        let arg = match &stmt.arg {
            Some(a) => Some(self.resolve_var(program, a)?),
            None => None,
        };
        self.landmark_hint = program.binding(&stmt.receiver).and_then(|b| b.landmark.clone());
        let target = || arg.clone().expect("validated: method takes an argument");
        match stmt.method {
            Method::GoTo => self.approach(&receiver),
            Method::Pickup => self.pickup(&receiver),
            Method::Place => self.place(&receiver, &target()),
            Method::PutDown => self.put_down(&receiver),
            Method::Open => self.open(&receiver),
            Method::Close => self.close(&receiver),
            Method::ToggleOn => self.toggle_on(&receiver),
            Method::ToggleOff => self.toggle_off(&receiver),
            Method::Slice => self.slice(&receiver),
            Method::Pour => self.pour(&receiver),
            Method::Clean => self.clean(&receiver),
        }
    }

    fn state_of(&self, id: &str) -> crate::simworld::ObjectState {
        self.world.object(id).map(|o| o.state).unwrap_or_default()
    }

    fn is_openable(&self, id: &str) -> bool {
        self.world.has(id, Capability::Openable)
    }

    fn ensure_holding(&mut self, id: &str) -> Flow<()> {
        if self.world.held.as_deref() == Some(id) {
            return Ok(());
        }
        if self.cfg.preconditions {
            self.pickup(id)
        } else {
            Err(failed(format!("using the {}", self.category_of(id)), "it is not being held"))
        }
    }

    fn pickup(&mut self, id: &str) -> Flow<()> {
        let pre = self.cfg.preconditions;
        if pre && self.world.held.as_deref() == Some(id) {
            return Ok(());
        }
        if let Some(h) = self.world.held.clone() {
            if pre {
                self.put_down(&h)?;
            }
        }
        if pre {
            let container = self
                .world
                .ancestors(id)
                .into_iter()
                .find(|a| self.world.affordances.has(&a.category, Capability::Openable) && !a.state.open)
                .map(|a| a.id.clone());
            if let Some(container) = container {
                self.approach(&container)?;
                if self.state_of(&container).on {
                    self.interact(Action::ToggleOff(container.clone()))?;
                }
                self.interact(Action::Open(container))?;
            }
        }
        self.approach(id)?;
        self.interact(Action::Pickup(id.to_string()))
    }

    fn place(&mut self, id: &str, target: &str) -> Flow<()> {
        self.ensure_holding(id)?;
        self.approach(target)?;
        if self.cfg.preconditions && self.is_openable(target) && !self.state_of(target).open {
            if self.state_of(target).on {
                self.interact(Action::ToggleOff(target.to_string()))?;
            }
            self.interact(Action::Open(target.to_string()))?;
        }
        self.interact(Action::Place(target.to_string()))
    }

    fn put_down(&mut self, id: &str) -> Flow<()> {
        if self.world.held.as_deref() != Some(id) {
            return Ok(());
        }
        let me = self.world.agent_pose().position;
        let surface = PUT_DOWN_SURFACES
            .iter()
            .flat_map(|cat| known_instances(&self.spatial.memory, cat, &[]))
            .map(|(sid, c)| (horizontal(me, c), sid.to_string()))
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
            .map(|(_, sid)| sid);
        let surface = match surface {
            Some(s) => s,
            None => self.find_category("CounterTop")?,
        };
        self.approach(&surface)?;
        self.interact(Action::Place(surface))
    }

    fn open(&mut self, id: &str) -> Flow<()> {
        if self.cfg.preconditions {
            if self.state_of(id).open {
                return Ok(());
            }
            if self.state_of(id).on {
                self.approach(id)?;
                self.interact(Action::ToggleOff(id.to_string()))?;
            }
        }
        self.approach(id)?;
        self.interact(Action::Open(id.to_string()))
    }

    fn close(&mut self, id: &str) -> Flow<()> {
        if self.cfg.preconditions && !self.state_of(id).open {
            return Ok(());
        }
        self.approach(id)?;
        self.interact(Action::Close(id.to_string()))
    }

    fn toggle_on(&mut self, id: &str) -> Flow<()> {
        self.approach(id)?;
        if self.cfg.preconditions {
            let s = self.state_of(id);
            if s.on {
                return Ok(());
            }
            if self.is_openable(id) && s.open {
                self.interact(Action::Close(id.to_string()))?;
            }
        }
        self.interact(Action::ToggleOn(id.to_string()))
    }

    fn toggle_off(&mut self, id: &str) -> Flow<()> {
        if self.cfg.preconditions && !self.state_of(id).on {
            return Ok(());
        }
        self.approach(id)?;
        self.interact(Action::ToggleOff(id.to_string()))
    }

    fn holding_knife(&self) -> bool {
        self.world
            .held
            .as_deref()
            .is_some_and(|h| matches!(self.category_of(h).as_str(), "Knife" | "ButterKnife"))
    }

    fn slice(&mut self, id: &str) -> Flow<()> {
        if self.cfg.preconditions && !self.holding_knife() {
            let knife = match self.nearest_known("Knife", &[]).or_else(|| self.nearest_known("ButterKnife", &[])) {
                Some(k) => k,
                None => self.find_category("Knife")?,
            };
            self.pickup(&knife)?;
        }
        self.approach(id)?;
        self.interact(Action::Slice(id.to_string()))
    }

    /// Pours the held container into `target`.
    fn pour(&mut self, target: &str) -> Flow<()> {
        if self.world.held.is_none() {
            let what = format!("pour into the {}", self.category_of(target));
            return Err(failed(what, "the agent is not holding a container"));
        }
        self.approach(target)?;
        self.interact(Action::Pour(target.to_string()))
    }

    fn clean(&mut self, id: &str) -> Flow<()> {
        self.ensure_holding(id)?;
        let sink = self.find_category("Sink")?;
        self.approach(&sink)?;
        self.interact(Action::Place(sink.clone()))?;
        let faucet = match self.near_landmark("Faucet", &[], &sink) {
            Some(f) => f,
            None => self.find_category("Faucet")?,
        };
        self.approach(&faucet)?;
        if self.state_of(&faucet).on {
            self.interact(Action::ToggleOff(faucet.clone()))?;
        }
        self.interact(Action::ToggleOn(faucet.clone()))?;
        self.interact(Action::ToggleOff(faucet))?;
        self.approach(id)?;
        self.interact(Action::Pickup(id.to_string()))
    }
}

