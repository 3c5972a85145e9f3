use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// `(row, col)`; row grows with world z, col with world x.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellClass {
    Unknown,
    Free,
    Obstacle,
}

/// Overhead occupancy grid anchored at world `(x, z) = (0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyMap {
    resolution: f64,
    rows: usize,
    cols: usize,
    free_hits: Vec<u32>,
    obstacle_hits: Vec<u32>,
    /// Cells declared explored without being observed (unreachable frontiers).
    settled: Vec<bool>,
}

impl OccupancyMap {
    pub const DEFAULT_RESOLUTION: f64 = 0.25;

    pub fn new(rows: usize, cols: usize, resolution: f64) -> Self {
        assert!(resolution > 0.0, "resolution must be positive");
        let n = rows * cols;
        Self { resolution, rows, cols, free_hits: vec![0; n], obstacle_hits: vec![0; n], settled: vec![false; n] }
    }

    /// Builds a map with known classes, e.g. from ground truth.
    pub fn from_classes(rows: usize, cols: usize, resolution: f64, class: impl Fn(Cell) -> CellClass) -> Self {
        let mut map = Self::new(rows, cols, resolution);
        for cell in map.cells() {
            match class(cell) {
                CellClass::Free => map.add_free(cell),
                CellClass::Obstacle => map.add_obstacle(cell),
                CellClass::Unknown => {}
            }
        }
        map
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        let cols = self.cols;
        (0..self.rows * cols).map(move |i| (i / cols, i % cols))
    }

    fn idx(&self, (r, c): Cell) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn contains(&self, (r, c): Cell) -> bool {
        r < self.rows && c < self.cols
    }

    pub fn cell_of(&self, x: f64, z: f64) -> Option<Cell> {
        if !(x.is_finite() && z.is_finite()) || x < 0.0 || z < 0.0 {
            return None;
        }
        let cell = ((z / self.resolution) as usize, (x / self.resolution) as usize);
        self.contains(cell).then_some(cell)
    }

    /// World `(x, z)` of a cell centre.
    pub fn center(&self, (r, c): Cell) -> (f64, f64) {
        ((c as f64 + 0.5) * self.resolution, (r as f64 + 0.5) * self.resolution)
    }

    pub fn class(&self, cell: Cell) -> CellClass {
        let i = self.idx(cell);
        if self.obstacle_hits[i] > 0 {
            CellClass::Obstacle
        } else if self.free_hits[i] > 0 {
            CellClass::Free
        } else {
            CellClass::Unknown
        }
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.class(cell) == CellClass::Free
    }

    pub fn observation_count(&self, cell: Cell) -> u32 {
        let i = self.idx(cell);
        self.free_hits[i] + self.obstacle_hits[i]
    }

    pub fn is_settled(&self, cell: Cell) -> bool {
        self.settled[self.idx(cell)]
    }

    pub fn add_free(&mut self, cell: Cell) {
        let i = self.idx(cell);
        self.free_hits[i] += 1;
    }

    pub fn add_obstacle(&mut self, cell: Cell) {
        let i = self.idx(cell);
        self.obstacle_hits[i] += 1;
    }

    /// Stops exploration from targeting `cell` again.
    pub fn mark_explored(&mut self, cell: Cell) {
        let i = self.idx(cell);
        self.settled[i] = true;
    }

    /// 4-connected in-bounds neighbours.
    pub fn neighbours(&self, (r, c): Cell) -> impl Iterator<Item = Cell> + '_ {
        let candidates = [
            r.checked_sub(1).map(|r| (r, c)),
            Some((r + 1, c)),
            c.checked_sub(1).map(|c| (r, c)),
            Some((r, c + 1)),
        ];
        candidates.into_iter().flatten().filter(move |&n| self.contains(n))
    }

    /// One character per cell: `#` obstacle, `.` free, `?` unknown.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(match self.class((r, c)) {
                    CellClass::Obstacle => '#',
                    CellClass::Free => '.',
                    CellClass::Unknown => '?',
                });
            }
            out.push('\n');
        }
        out
    }

    /// Counts dump for debugging: `free/obstacle` per cell.
    pub fn counts_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|c| format!("{}/{}", self.free_hits[self.idx((r, c))], self.obstacle_hits[self.idx((r, c))])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}
