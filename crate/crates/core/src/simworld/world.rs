use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::render::render;
use super::SimError;
use crate::catalog::{Affordances, Capability};
use crate::spatial::{CameraModel, Cell, CellClass, Frame, OccupancyMap, Pose, CAMERA_HEIGHT};

/// Horizontal reach for interactions, in meters.
pub const INTERACTION_RANGE: f64 = 1.5;
pub const WALL_HEIGHT: f64 = 2.5;
/// Edge length of the cube used for every small object.
pub const ITEM_SIZE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tile {
    Floor,
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateAttr {
    Open,
    On,
    Sliced,
    Clean,
    Cooked,
    Filled,
    Dirty,
}

impl StateAttr {
    pub const ALL: [StateAttr; 7] = [
        StateAttr::Open,
        StateAttr::On,
        StateAttr::Sliced,
        StateAttr::Clean,
        StateAttr::Cooked,
        StateAttr::Filled,
        StateAttr::Dirty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateAttr::Open => "open",
            StateAttr::On => "on",
            StateAttr::Sliced => "sliced",
            StateAttr::Clean => "clean",
            StateAttr::Cooked => "cooked",
            StateAttr::Filled => "filled",
            StateAttr::Dirty => "dirty",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectState {
    pub open: bool,
    pub on: bool,
    pub sliced: bool,
    pub cooked: bool,
    pub filled: bool,
    pub dirty: bool,
}

impl ObjectState {
    pub fn get(&self, attr: StateAttr) -> bool {
        match attr {
            StateAttr::Open => self.open,
            StateAttr::On => self.on,
            StateAttr::Sliced => self.sliced,
            StateAttr::Clean => !self.dirty,
            StateAttr::Cooked => self.cooked,
            StateAttr::Filled => self.filled,
            StateAttr::Dirty => self.dirty,
        }
    }

    pub fn set(&mut self, attr: StateAttr, value: bool) {
        match attr {
            StateAttr::Open => self.open = value,
            StateAttr::On => self.on = value,
            StateAttr::Sliced => self.sliced = value,
            StateAttr::Clean => self.dirty = !value,
            StateAttr::Cooked => self.cooked = value,
            StateAttr::Filled => self.filled = value,
            StateAttr::Dirty => self.dirty = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Placement {
    /// Occupies a whole grid cell.
    Furniture { row: usize, col: usize },
    /// Rests on or in its parent, or is held when the parent is `None`.
    Item,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldObject {
    pub id: String,
    pub category: String,
    pub placement: Placement,
    pub parent: Option<String>,
    pub state: ObjectState,
    /// Placement order; fixes slot positions on shared surfaces.
    pub seq: u64,
}

impl WorldObject {
    pub fn is_furniture(&self) -> bool {
        matches!(self.placement, Placement::Furniture { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub row: usize,
    pub col: usize,
    /// One of 0, 90, 180, 270.
    pub yaw: u32,
    /// Multiple of 30 in [-60, 60]; positive looks down.
    pub pitch: i32,
}

impl Agent {
    pub fn cell(&self) -> Cell {
        (self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub steps: u32,
    pub api_failures: u32,
    /// Successful translations.
    pub path_length: u32,
}

/// Primitive actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", content = "object")]
pub enum Action {
    MoveAhead,
    MoveBack,
    MoveLeft,
    MoveRight,
    RotateLeft,
    RotateRight,
    LookUp,
    LookDown,
    Pickup(String),
    Place(String),
    Open(String),
    Close(String),
    ToggleOn(String),
    ToggleOff(String),
    Slice(String),
    Pour(String),
}

impl Action {
    pub fn target(&self) -> Option<&str> {
        match self {
            Action::Pickup(t)
            | Action::Place(t)
            | Action::Open(t)
            | Action::Close(t)
            | Action::ToggleOn(t)
            | Action::ToggleOff(t)
            | Action::Slice(t)
            | Action::Pour(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_interaction(&self) -> bool {
        self.target().is_some()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Action::MoveAhead => "MoveAhead",
            Action::MoveBack => "MoveBack",
            Action::MoveLeft => "MoveLeft",
            Action::MoveRight => "MoveRight",
            Action::RotateLeft => "RotateLeft",
            Action::RotateRight => "RotateRight",
            Action::LookUp => "LookUp",
            Action::LookDown => "LookDown",
            Action::Pickup(_) => "Pickup",
            Action::Place(_) => "Place",
            Action::Open(_) => "Open",
            Action::Close(_) => "Close",
            Action::ToggleOn(_) => "ToggleOn",
            Action::ToggleOff(_) => "ToggleOff",
            Action::Slice(_) => "Slice",
            Action::Pour(_) => "Pour",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub success: bool,
    pub reason: Option<String>,
}

impl StepResult {
    fn ok() -> Self {
        Self { success: true, reason: None }
    }

    fn fail(reason: impl Into<String>) -> Self {
        Self { success: false, reason: Some(reason.into()) }
    }
}

/// Complete, serialisable world state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub name: String,
    pub cell_size: f64,
    pub(crate) tiles: Vec<Vec<Tile>>,
    pub(crate) objects: BTreeMap<String, WorldObject>,
    pub agent: Agent,
    pub held: Option<String>,
    pub stats: EpisodeStats,
    pub camera: CameraModel,
    pub affordances: Affordances,
    pub(crate) next_seq: u64,
}

/// Top surface height of a furniture category.
pub fn furniture_height(category: &str, open: bool) -> f64 {
    match (category, open) {
        ("Fridge", false) => 1.8,
        ("Fridge", true) => 0.85,
        ("Microwave", false) => 1.2,
        ("Microwave", true) => 0.9,
        ("Cabinet", false) => 0.9,
        ("Cabinet", true) => 0.6,
        ("Drawer", false) => 0.8,
        ("Drawer", true) => 0.6,
        ("CounterTop", _) | ("Stove", _) | ("Shelf", _) => 0.9,
        ("DiningTable", _) | ("Desk", _) => 0.75,
        ("Sink", _) => 0.85,
        ("CoffeeMachine", _) | ("Toaster", _) => 0.95,
        ("Sofa", _) | ("Toilet", _) => 0.45,
        ("Bed", _) | ("SideTable", _) => 0.6,
        ("GarbageCan", _) => 0.35,
        _ => 0.75,
    }
}

const SLOTS: [(f64, f64); 4] = [(-0.06, -0.06), (0.06, -0.06), (-0.06, 0.06), (0.06, 0.06)];

/// Axis-aligned box, `min`/`max` in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn center(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| (self.min[i] + self.max[i]) / 2.0)
    }
}

impl World {
    pub(crate) fn from_parts(
        name: String,
        cell_size: f64,
        tiles: Vec<Vec<Tile>>,
        objects: Vec<WorldObject>,
        agent: Agent,
        affordances: Affordances,
    ) -> Self {
        let next_seq = objects.iter().map(|o| o.seq + 1).max().unwrap_or(0);
        Self {
            name,
            cell_size,
            tiles,
            objects: objects.into_iter().map(|o| (o.id.clone(), o)).collect(),
            agent,
            held: None,
            stats: EpisodeStats::default(),
            camera: CameraModel::from_fov(64, 64, 90.0).expect("valid camera"),
            affordances,
            next_seq,
        }
    }

    pub fn rows(&self) -> usize {
        self.tiles.len()
    }

    pub fn cols(&self) -> usize {
        self.tiles.first().map_or(0, Vec::len)
    }

    pub fn tile(&self, (r, c): Cell) -> Option<Tile> {
        self.tiles.get(r).and_then(|row| row.get(c)).copied()
    }

    pub fn objects(&self) -> impl Iterator<Item = &WorldObject> {
        self.objects.values()
    }

    pub fn object(&self, id: &str) -> Option<&WorldObject> {
        self.objects.get(id)
    }

    pub fn object_mut(&mut self, id: &str) -> Option<&mut WorldObject> {
        self.objects.get_mut(id)
    }

    pub fn of_category(&self, category: &str) -> Vec<&WorldObject> {
        self.objects.values().filter(|o| o.category == category).collect()
    }

    pub fn has(&self, id: &str, cap: Capability) -> bool {
        self.object(id).is_some_and(|o| self.affordances.has(&o.category, cap))
    }

    pub fn furniture_at(&self, cell: Cell) -> Option<&WorldObject> {
        self.objects
            .values()
            .find(|o| matches!(o.placement, Placement::Furniture { row, col } if (row, col) == cell))
    }

    /// Floor without furniture.
    pub fn is_walkable(&self, cell: Cell) -> bool {
        self.tile(cell) == Some(Tile::Floor) && self.furniture_at(cell).is_none()
    }

    pub fn ground_truth_map(&self) -> OccupancyMap {
        OccupancyMap::from_classes(self.rows(), self.cols(), self.cell_size, |cell| {
            if self.is_walkable(cell) {
                CellClass::Free
            } else {
                CellClass::Obstacle
            }
        })
    }

    /// Parent chain, nearest first.
    pub fn ancestors(&self, id: &str) -> Vec<&WorldObject> {
        let mut out = Vec::new();
        let mut cur = self.object(id).and_then(|o| o.parent.as_deref());
        while let Some(p) = cur.and_then(|p| self.object(p)) {
            if out.iter().any(|o: &&WorldObject| o.id == p.id) {
                break;
            }
            out.push(p);
            cur = p.parent.as_deref();
        }
        out
    }

    pub fn children(&self, id: &str) -> Vec<&WorldObject> {
        let mut kids: Vec<_> = self.objects.values().filter(|o| o.parent.as_deref() == Some(id)).collect();
        kids.sort_by(|a, b| a.seq.cmp(&b.seq).then_with(|| a.id.cmp(&b.id)));
        kids
    }

    pub fn descendants(&self, id: &str) -> Vec<&WorldObject> {
        let mut out = Vec::new();
        let mut stack = vec![id.to_string()];
        while let Some(cur) = stack.pop() {
            for kid in self.children(&cur) {
                stack.push(kid.id.clone());
                out.push(kid);
            }
        }
        out
    }

    /// The furniture an object ultimately rests on.
    pub fn root_furniture(&self, id: &str) -> Option<&WorldObject> {
        let obj = self.object(id)?;
        if obj.is_furniture() {
            return Some(obj);
        }
        self.ancestors(id).into_iter().find(|o| o.is_furniture())
    }

    /// Inside some closed openable ancestor.
    pub fn is_enclosed(&self, id: &str) -> bool {
        self.ancestors(id)
            .iter()
            .any(|a| self.affordances.has(&a.category, Capability::Openable) && !a.state.open)
    }

    pub fn is_held(&self, id: &str) -> bool {
        self.held.as_deref() == Some(id) || self.ancestors(id).iter().any(|a| self.held.as_deref() == Some(&a.id))
    }

    /// Bounding box of a rendered object; `None` when held or enclosed.
    pub fn bounds(&self, id: &str) -> Option<Aabb> {
        if self.is_held(id) || self.is_enclosed(id) {
            return None;
        }
        self.raw_bounds(id)
    }

    fn raw_bounds(&self, id: &str) -> Option<Aabb> {
        let obj = self.object(id)?;
        let cs = self.cell_size;
        match obj.placement {
            Placement::Furniture { row, col } => {
                let h = furniture_height(&obj.category, obj.state.open);
                Some(Aabb {
                    min: [col as f64 * cs, 0.0, row as f64 * cs],
                    max: [(col + 1) as f64 * cs, h, (row + 1) as f64 * cs],
                })
            }
            Placement::Item => {
                let parent = self.object(obj.parent.as_deref()?)?;
                let pb = self.raw_bounds(&parent.id)?;
                let siblings = self.children(&parent.id);
                let k = siblings.iter().position(|s| s.id == obj.id).unwrap_or(0);
                let half = ITEM_SIZE / 2.0;
                let (cx, cz, y0) = if parent.is_furniture() {
                    let c = pb.center();
                    let (dx, dz) = SLOTS[k % SLOTS.len()];
                    (c[0] + dx, c[2] + dz, pb.max[1] + (k / SLOTS.len()) as f64 * ITEM_SIZE)
                } else {
                    let c = pb.center();
                    (c[0], c[2], pb.max[1] + k as f64 * ITEM_SIZE)
                };
                Some(Aabb { min: [cx - half, y0, cz - half], max: [cx + half, y0 + ITEM_SIZE, cz + half] })
            }
        }
    }

    /// Centre of the object; held objects report the agent's camera position.
    pub fn position(&self, id: &str) -> Option<[f64; 3]> {
        if self.is_held(id) {
            let p = self.agent_pose().position;
            return Some(p);
        }
        self.raw_bounds(id).map(|b| b.center())
    }

    pub fn agent_pose(&self) -> Pose {
        let cs = self.cell_size;
        Pose {
            position: [(self.agent.col as f64 + 0.5) * cs, CAMERA_HEIGHT, (self.agent.row as f64 + 0.5) * cs],
            yaw_deg: self.agent.yaw as f64,
            pitch_deg: self.agent.pitch as f64,
        }
    }

    pub fn render(&self) -> Frame {
        render(self, &self.agent_pose(), &self.camera)
    }

    pub fn render_from(&self, pose: &Pose, cam: &CameraModel) -> Frame {
        render(self, pose, cam)
    }

    pub fn horizontal_distance_to(&self, id: &str) -> Option<f64> {
        let p = self.position(id)?;
        let a = self.agent_pose().position;
        Some((p[0] - a[0]).hypot(p[2] - a[2]))
    }

    /// Visible in the current view and within reach.
    pub fn is_interactable(&self, id: &str) -> bool {
        self.horizontal_distance_to(id).is_some_and(|d| d <= INTERACTION_RANGE) && self.render().shows(id)
    }

    pub fn state_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("world serialises");
        hex::encode(Sha256::digest(bytes))
    }

    /// Moves an object directly, bypassing the rules; used to set up episodes.
    pub fn set_parent(&mut self, id: &str, parent: &str) -> Result<(), SimError> {
        if !self.objects.contains_key(parent) {
            return Err(SimError::UnknownObject(parent.to_string()));
        }
        if id == parent || self.ancestors(parent).iter().any(|a| a.id == id) {
            return Err(SimError::Scene(format!("placing `{id}` into `{parent}` makes a cycle")));
        }
        let seq = self.next_seq;
        let obj = self.objects.get_mut(id).ok_or_else(|| SimError::UnknownObject(id.to_string()))?;
        if obj.is_furniture() {
            return Err(SimError::Scene(format!("`{id}` is furniture and cannot move")));
        }
        obj.parent = Some(parent.to_string());
        obj.seq = seq;
        self.next_seq += 1;
        if self.held.as_deref() == Some(id) {
            self.held = None;
        }
        Ok(())
    }

    pub fn step(&mut self, action: &Action) -> StepResult {
        self.stats.steps += 1;
        let result = match action {
            Action::MoveAhead => self.translate(0),
            Action::MoveRight => self.translate(90),
            Action::MoveBack => self.translate(180),
            Action::MoveLeft => self.translate(270),
            Action::RotateLeft => {
                self.agent.yaw = (self.agent.yaw + 270) % 360;
                StepResult::ok()
            }
            Action::RotateRight => {
                self.agent.yaw = (self.agent.yaw + 90) % 360;
                StepResult::ok()
            }
            Action::LookUp => self.look(-30),
            Action::LookDown => self.look(30),
            _ => self.interact(action),
        };
        if !result.success && action.is_interaction() {
            self.stats.api_failures += 1;
        }
        result
    }

    fn translate(&mut self, offset: u32) -> StepResult {
        let yaw = (self.agent.yaw + offset) % 360;
        let (r, c) = (self.agent.row as i64, self.agent.col as i64);
        let (nr, nc) = match yaw {
            0 => (r + 1, c),
            90 => (r, c + 1),
            180 => (r - 1, c),
            _ => (r, c - 1),
        };
        if nr < 0 || nc < 0 || !self.is_walkable((nr as usize, nc as usize)) {
            return StepResult::fail("path blocked");
        }
        self.agent.row = nr as usize;
        self.agent.col = nc as usize;
        self.stats.path_length += 1;
        StepResult::ok()
    }

    fn look(&mut self, delta: i32) -> StepResult {
        let next = self.agent.pitch + delta;
        if !(-60..=60).contains(&next) {
            return StepResult::fail("cannot tilt further");
        }
        self.agent.pitch = next;
        StepResult::ok()
    }

    fn interact(&mut self, action: &Action) -> StepResult {
        let id = action.target().expect("interaction has a target").to_string();
        let Some(obj) = self.object(&id) else {
            return StepResult::fail(format!("no object `{id}`"));
        };
        let cat = obj.category.clone();
        let state = obj.state;
        let needs = |cap: Capability| -> Result<(), StepResult> {
            if self.affordances.has(&cat, cap) {
                Ok(())
            } else {
                Err(StepResult::fail(format!("{cat} is not {cap}")))
            }
        };
        let cap = match action {
            Action::Pickup(_) => Capability::Pickupable,
            Action::Place(_) | Action::Pour(_) => Capability::Receptacle,
            Action::Open(_) | Action::Close(_) => Capability::Openable,
            Action::ToggleOn(_) | Action::ToggleOff(_) => Capability::Toggleable,
            Action::Slice(_) => Capability::Sliceable,
            _ => unreachable!("navigation handled above"),
        };
        if let Err(fail) = needs(cap) {
            return fail;
        }
        if self.is_held(&id) {
            return StepResult::fail(format!("{cat} is being held"));
        }
        if !self.is_interactable(&id) {
            return StepResult::fail(format!("{cat} is not visible or out of reach"));
        }
        match action {
            Action::Pickup(_) => {
                if let Some(h) = &self.held {
                    return StepResult::fail(format!("already holding `{h}`"));
                }
                let o = self.objects.get_mut(&id).expect("checked");
                o.parent = None;
                self.held = Some(id);
            }
            Action::Place(_) => {
                let Some(h) = self.held.clone() else {
                    return StepResult::fail("not holding anything");
                };
                if self.affordances.has(&cat, Capability::Openable) && !state.open {
                    return StepResult::fail(format!("{cat} is closed"));
                }
                let seq = self.next_seq;
                self.next_seq += 1;
                let o = self.objects.get_mut(&h).expect("held object exists");
                o.parent = Some(id.clone());
                o.seq = seq;
                self.held = None;
                if let Some(appliance) = self.active_appliance_over(&h) {
                    self.apply_appliance(&appliance);
                }
            }
            Action::Open(_) => {
                if state.open {
                    return StepResult::fail(format!("{cat} is already open"));
                }
                if cat == "Microwave" && state.on {
                    return StepResult::fail("microwave is on");
                }
                self.objects.get_mut(&id).expect("checked").state.open = true;
            }
            Action::Close(_) => {
                if !state.open {
                    return StepResult::fail(format!("{cat} is already closed"));
                }
                self.objects.get_mut(&id).expect("checked").state.open = false;
            }
            Action::ToggleOn(_) => {
                if state.on {
                    return StepResult::fail(format!("{cat} is already on"));
                }
                if self.affordances.has(&cat, Capability::Openable) && state.open {
                    return StepResult::fail(format!("{cat} door is open"));
                }
                self.objects.get_mut(&id).expect("checked").state.on = true;
                self.apply_appliance(&id);
            }
            Action::ToggleOff(_) => {
                if !state.on {
                    return StepResult::fail(format!("{cat} is already off"));
                }
                self.objects.get_mut(&id).expect("checked").state.on = false;
            }
            Action::Slice(_) => {
                let has_knife = self
                    .held
                    .as_deref()
                    .and_then(|h| self.object(h))
                    .is_some_and(|h| h.category == "Knife" || h.category == "ButterKnife");
                if !has_knife {
                    return StepResult::fail("slicing requires holding a knife");
                }
                if state.sliced {
                    return StepResult::fail(format!("{cat} is already sliced"));
                }
                self.objects.get_mut(&id).expect("checked").state.sliced = true;
            }
            Action::Pour(_) => {
                let Some(h) = self.held.clone() else {
                    return StepResult::fail("not holding anything");
                };
                let held = self.object(&h).expect("held object exists");
                if !self.affordances.has(&held.category, Capability::Fillable) || !held.state.filled {
                    return StepResult::fail("held object is not filled");
                }
                self.objects.get_mut(&h).expect("held").state.filled = false;
                if self.affordances.has(&cat, Capability::Fillable) {
                    self.objects.get_mut(&id).expect("checked").state.filled = true;
                }
            }
            _ => unreachable!(),
        }
        StepResult::ok()
    }

    /// A switched-on appliance that `id` now sits in or on.
    fn active_appliance_over(&self, id: &str) -> Option<String> {
        let mut chain: Vec<&WorldObject> = self.ancestors(id);
        // A faucet acts on its sink's contents.
        for a in chain.clone() {
            chain.extend(self.children(&a.id).into_iter().filter(|k| k.category == "Faucet"));
        }
        chain
            .into_iter()
            .find(|a| a.state.on && !(a.category == "Microwave" && a.state.open))
            .map(|a| a.id.clone())
    }

    fn apply_appliance(&mut self, id: &str) {
        let Some(app) = self.object(id) else { return };
        let (cat, parent) = (app.category.clone(), app.parent.clone());
        let targets: Vec<String> = match cat.as_str() {
            "Faucet" => parent
                .map(|sink| self.descendants(&sink).into_iter().filter(|o| o.id != id).map(|o| o.id.clone()).collect())
                .unwrap_or_default(),
            _ => self.descendants(id).into_iter().map(|o| o.id.clone()).collect(),
        };
        for t in targets {
            let tcat = self.objects[&t].category.clone();
            let heatable = self.affordances.has(&tcat, Capability::Heatable);
            let fillable = self.affordances.has(&tcat, Capability::Fillable);
            let s = &mut self.objects.get_mut(&t).expect("descendant exists").state;
            match cat.as_str() {
                "Faucet" => {
                    s.dirty = false;
                    if fillable {
                        s.filled = true;
                    }
                }
                "Microwave" | "Stove" | "Toaster" if heatable => s.cooked = true,
                "CoffeeMachine" if fillable => s.filled = true,
                _ => {}
            }
        }
    }
}
