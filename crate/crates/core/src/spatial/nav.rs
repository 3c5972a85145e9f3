use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::map::{Cell, CellClass, OccupancyMap};
use super::SpatialError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NavAction {
    MoveAhead,
    RotateLeft,
    RotateRight,
}

/// Cell sequence from start to goal, inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub cells: Vec<Cell>,
}

/// Yaw that faces from `a` towards the 4-neighbour `b`.
pub fn step_yaw(a: Cell, b: Cell) -> u32 {
    match (b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64) {
        (1, 0) => 0,
        (0, 1) => 90,
        (-1, 0) => 180,
        (0, -1) => 270,
        d => panic!("cells {a:?} and {b:?} are not 4-neighbours ({d:?})"),
    }
}

/// Rotations turning `from` into `to`, both multiples of 90.
pub fn rotations(from: u32, to: u32) -> Vec<NavAction> {
    match (to + 360 - from) % 360 {
        0 => vec![],
        90 => vec![NavAction::RotateRight],
        180 => vec![NavAction::RotateRight, NavAction::RotateRight],
        _ => vec![NavAction::RotateLeft],
    }
}

impl Path {
    /// Number of cell-to-cell moves.
    pub fn len(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_actions(&self, start_yaw: u32) -> Vec<NavAction> {
        let mut yaw = start_yaw % 360;
        let mut out = Vec::new();
        for w in self.cells.windows(2) {
            let want = step_yaw(w[0], w[1]);
            out.extend(rotations(yaw, want));
            out.push(NavAction::MoveAhead);
            yaw = want;
        }
        out
    }
}

/// Breadth-first distance to the nearest goal over free cells. Goal cells are
/// always admitted; obstacles never are.
pub fn geodesic_field(map: &OccupancyMap, goals: &[Cell]) -> Vec<Option<u32>> {
    let idx = |(r, c): Cell| r * map.cols() + c;
    let mut dist = vec![None; map.len()];
    let mut queue = VecDeque::new();
    for &g in goals {
        if map.contains(g) && map.class(g) != CellClass::Obstacle && dist[idx(g)].is_none() {
            dist[idx(g)] = Some(0);
            queue.push_back(g);
        }
    }
    while let Some(cell) = queue.pop_front() {
        let d = dist[idx(cell)].unwrap_or(0);
        for n in map.neighbours(cell) {
            if dist[idx(n)].is_none() && map.is_free(n) {
                dist[idx(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

fn check_cell(map: &OccupancyMap, cell: Cell, what: &str) -> Result<(), SpatialError> {
    if !map.contains(cell) {
        return Err(SpatialError::Input(format!("{what} {cell:?} outside the map")));
    }
    if map.class(cell) == CellClass::Obstacle {
        return Err(SpatialError::Input(format!("{what} {cell:?} is an obstacle")));
    }
    Ok(())
}

pub fn plan_path(map: &OccupancyMap, start: Cell, goal: Cell) -> Result<Option<Path>, SpatialError> {
    check_cell(map, goal, "goal")?;
    plan_path_to_any(map, start, &[goal], 0)
}

/// Shortest path to the nearest of `goals`, descending the geodesic field and
/// preferring to keep the current heading. `None` when unreachable.
pub fn plan_path_to_any(
    map: &OccupancyMap,
    start: Cell,
    goals: &[Cell],
    heading_yaw: u32,
) -> Result<Option<Path>, SpatialError> {
    check_cell(map, start, "start")?;
    let field = geodesic_field(map, goals);
    let idx = |(r, c): Cell| r * map.cols() + c;
    let Some(mut d) = field[idx(start)] else {
        return Ok(None);
    };
    let mut cells = vec![start];
    let mut cur = start;
    let mut yaw = heading_yaw % 360;
    while d > 0 {
        let next = map
            .neighbours(cur)
            .filter(|&n| field[idx(n)] == Some(d - 1))
            .min_by_key(|&n| {
                let turn = (step_yaw(cur, n) + 360 - yaw) % 360;
                (turn != 0, turn == 180, n)
            })
            .expect("field decreases along some neighbour");
        yaw = step_yaw(cur, next);
        cells.push(next);
        cur = next;
        d -= 1;
    }
    Ok(Some(Path { cells }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_corridor() {
        let map = OccupancyMap::from_classes(10, 10, 0.25, |_| CellClass::Free);
        let p = plan_path(&map, (0, 0), (0, 5)).unwrap().unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.to_actions(90), vec![NavAction::MoveAhead; 5]);
        let a = p.to_actions(0);
        assert_eq!(a[0], NavAction::RotateRight);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn walled_goal_is_unreachable() {
        let map = OccupancyMap::from_classes(5, 5, 0.25, |(r, c)| {
            if (r, c) == (4, 4) {
                CellClass::Free
            } else if r >= 3 && c >= 3 {
                CellClass::Obstacle
            } else {
                CellClass::Free
            }
        });
        assert_eq!(plan_path(&map, (0, 0), (4, 4)).unwrap(), None);
    }

    #[test]
    fn obstacle_endpoints_are_errors() {
        let map = OccupancyMap::from_classes(3, 3, 0.25, |c| if c == (1, 1) { CellClass::Obstacle } else { CellClass::Free });
        assert!(plan_path(&map, (1, 1), (0, 0)).is_err());
        assert!(plan_path(&map, (0, 0), (1, 1)).is_err());
    }

    #[test]
    fn rotation_table() {
        assert_eq!(rotations(0, 270), vec![NavAction::RotateLeft]);
        assert_eq!(rotations(270, 0), vec![NavAction::RotateRight]);
        assert_eq!(rotations(90, 270).len(), 2);
    }
}
