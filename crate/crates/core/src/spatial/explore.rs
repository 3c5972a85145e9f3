use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::map::{Cell, CellClass, OccupancyMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploreConfig {
    /// A cell counts as explored once observed this many times.
    pub explored_threshold: u32,
    /// Exploration is done when fewer than this fraction of cells remain.
    pub done_fraction: f64,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        Self { explored_threshold: 1, done_fraction: 0.02 }
    }
}

/// Unexplored, non-obstacle cells next to free space reachable from `origin`
/// (or next to any free cell when `origin` is `None`), in row-major order.
pub fn unexplored_frontier(map: &OccupancyMap, origin: Option<Cell>, cfg: &ExploreConfig) -> Vec<Cell> {
    let mut reach = vec![false; map.len()];
    let idx = |(r, c): Cell| r * map.cols() + c;
    match origin {
        Some(o) if map.contains(o) => {
            let mut queue = VecDeque::from([o]);
            reach[idx(o)] = true;
            while let Some(cell) = queue.pop_front() {
                for n in map.neighbours(cell) {
                    if !reach[idx(n)] && map.is_free(n) {
                        reach[idx(n)] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        Some(_) => {}
        None => {
            for cell in map.cells() {
                reach[idx(cell)] = map.is_free(cell);
            }
        }
    }
    map.cells()
        .filter(|&cell| {
            map.observation_count(cell) < cfg.explored_threshold
                && !map.is_settled(cell)
                && map.class(cell) != CellClass::Obstacle
                && map.neighbours(cell).any(|n| reach[idx(n)])
        })
        .collect()
}

/// Uniformly samples an exploration goal, or `None` once exploration is done.
pub fn sample_exploration_goal(
    map: &OccupancyMap,
    seed: u64,
    origin: Option<Cell>,
    cfg: &ExploreConfig,
) -> Option<Cell> {
    let frontier = unexplored_frontier(map, origin, cfg);
    if frontier.is_empty() || (frontier.len() as f64) < cfg.done_fraction * map.len() as f64 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    frontier.choose(&mut rng).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_free(n: usize) -> OccupancyMap {
        OccupancyMap::from_classes(n, n, 0.25, |_| CellClass::Free)
    }

    #[test]
    fn fully_explored_is_done() {
        assert_eq!(sample_exploration_goal(&all_free(6), 1, None, &ExploreConfig::default()), None);
    }

    #[test]
    fn single_frontier_cell_is_certain() {
        let map = OccupancyMap::from_classes(6, 6, 0.25, |c| if c == (3, 3) { CellClass::Unknown } else { CellClass::Free });
        let cfg = ExploreConfig { done_fraction: 0.0, ..Default::default() };
        for seed in 0..20 {
            assert_eq!(sample_exploration_goal(&map, seed, Some((0, 0)), &cfg), Some((3, 3)));
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let map = OccupancyMap::from_classes(10, 10, 0.25, |(r, _)| if r < 3 { CellClass::Free } else { CellClass::Unknown });
        let cfg = ExploreConfig::default();
        let a = sample_exploration_goal(&map, 7, Some((0, 0)), &cfg);
        assert!(a.is_some());
        assert_eq!(a, sample_exploration_goal(&map, 7, Some((0, 0)), &cfg));
    }

    #[test]
    fn walled_off_unknown_is_not_frontier() {
        let map = OccupancyMap::from_classes(5, 5, 0.25, |(_, c)| match c {
            0 | 1 => CellClass::Free,
            2 => CellClass::Obstacle,
            _ => CellClass::Unknown,
        });
        assert!(unexplored_frontier(&map, Some((0, 0)), &ExploreConfig::default()).is_empty());
    }

    #[test]
    fn settled_cells_are_skipped() {
        let mut map = OccupancyMap::from_classes(3, 3, 0.25, |c| if c == (1, 1) { CellClass::Unknown } else { CellClass::Free });
        map.mark_explored((1, 1));
        assert!(unexplored_frontier(&map, None, &ExploreConfig::default()).is_empty());
    }
}
