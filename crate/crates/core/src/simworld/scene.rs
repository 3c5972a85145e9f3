use super::world::{Agent, ObjectState, Placement, StateAttr, Tile, World, WorldObject};
use super::SimError;
use crate::catalog::{Capability, Catalog};
use crate::spatial::OccupancyMap;

fn parse_flags(line_no: usize, flags: &[&str]) -> Result<ObjectState, SimError> {
    let mut state = ObjectState::default();
    for flag in flags {
        let attr = StateAttr::from_name(flag)
            .ok_or_else(|| SimError::Parse { line: line_no, message: format!("unknown state flag `{flag}`") })?;
        state.set(attr, true);
    }
    Ok(state)
}

/// Parses a scene file into a fresh world.
///
/// ```text
/// scene kitchen_a
/// grid
/// #####
/// #...#
/// #####
/// end
/// agent 1 1 90
/// furniture counter_1 CounterTop 1 3
/// item apple_1 Apple counter_1 dirty
/// ```
pub fn parse_scene(text: &str, catalog: &Catalog) -> Result<World, SimError> {
    let mut name = None;
    let mut cell_size = OccupancyMap::DEFAULT_RESOLUTION;
    let mut tiles: Vec<Vec<Tile>> = Vec::new();
    let mut agent = None;
    let mut objects: Vec<WorldObject> = Vec::new();
    let mut in_grid = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| SimError::Parse { line: line_no, message };
        if in_grid {
            let row = raw.trim();
            if row == "end" {
                in_grid = false;
                continue;
            }
            let parsed: Result<Vec<Tile>, SimError> = row
                .chars()
                .map(|ch| match ch {
                    '#' => Ok(Tile::Wall),
                    '.' => Ok(Tile::Floor),
                    other => Err(err(format!("unexpected grid character `{other}`"))),
                })
                .collect();
            let parsed = parsed?;
            if tiles.first().is_some_and(|first| first.len() != parsed.len()) {
                return Err(err("grid rows differ in length".into()));
            }
            tiles.push(parsed);
            continue;
        }
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected a number, got `{s}`")));
        match words[0] {
            "scene" if words.len() == 2 => name = Some(words[1].to_string()),
            "cell" if words.len() == 2 => {
                cell_size = words[1].parse().map_err(|_| err("bad cell size".into()))?;
            }
            "grid" => in_grid = true,
            "agent" if words.len() == 4 => {
                let yaw = num(words[3])? as u32;
                if yaw % 90 != 0 || yaw >= 360 {
                    return Err(err("agent yaw must be 0, 90, 180 or 270".into()));
                }
                agent = Some(Agent { row: num(words[1])?, col: num(words[2])?, yaw, pitch: 30 });
            }
            "furniture" if words.len() >= 5 => {
                let (row, col) = (num(words[3])?, num(words[4])?);
                objects.push(WorldObject {
                    id: words[1].to_string(),
                    category: words[2].to_string(),
                    placement: Placement::Furniture { row, col },
                    parent: None,
                    state: parse_flags(line_no, &words[5..])?,
                    seq: objects.len() as u64,
                });
            }
            "item" if words.len() >= 4 => {
                if !objects.iter().any(|o| o.id == words[3]) {
                    return Err(err(format!("parent `{}` must be declared first", words[3])));
                }
                objects.push(WorldObject {
                    id: words[1].to_string(),
                    category: words[2].to_string(),
                    placement: Placement::Item,
                    parent: Some(words[3].to_string()),
                    state: parse_flags(line_no, &words[4..])?,
                    seq: objects.len() as u64,
                });
            }
            other => return Err(err(format!("unrecognised line starting with `{other}`"))),
        }
    }

    let name = name.ok_or_else(|| SimError::Scene("missing `scene` line".into()))?;
    if in_grid {
        return Err(SimError::Scene("grid not terminated by `end`".into()));
    }
    if tiles.is_empty() {
        return Err(SimError::Scene("empty grid".into()));
    }
    let agent = agent.ok_or_else(|| SimError::Scene("missing `agent` line".into()))?;
    let mut seen = std::collections::BTreeSet::new();
    for o in &objects {
        if !seen.insert(o.id.as_str()) {
            return Err(SimError::Scene(format!("duplicate object id `{}`", o.id)));
        }
        if !catalog.contains(&o.category) {
            return Err(SimError::Scene(format!("unknown category `{}`", o.category)));
        }
        if o.state.open && !catalog.has(&o.category, Capability::Openable) {
            return Err(SimError::Scene(format!("`{}` cannot be open", o.id)));
        }
        if let Placement::Furniture { row, col } = o.placement {
            if tiles.get(row).and_then(|r| r.get(col)) != Some(&Tile::Floor) {
                return Err(SimError::Scene(format!("`{}` is not on a floor cell", o.id)));
            }
            if objects.iter().any(|p| p.id != o.id && p.placement == o.placement) {
                return Err(SimError::Scene(format!("two objects share the cell of `{}`", o.id)));
            }
        }
    }
    let world = World::from_parts(name, cell_size, tiles, objects, agent, catalog.affordances().clone());
    if !world.is_walkable(world.agent.cell()) {
        return Err(SimError::Scene("agent does not start on free floor".into()));
    }
    Ok(world)
}

/// Loads one of the shipped scenes.
pub fn builtin_scene(name: &str, catalog: &Catalog) -> Result<World, SimError> {
    let text = crate::assets::scene(name).ok_or_else(|| SimError::Scene(format!("no scene named `{name}`")))?;
    parse_scene(text, catalog)
}
