//! The agent's geometric belief: camera geometry, occupancy map, object
//! memory, exploration and geodesic navigation.

mod camera;
mod explore;
mod map;
mod nav;
mod objects;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use camera::{pixel_ray, project, unproject, CameraModel, Pose, CAMERA_HEIGHT};
pub use explore::{sample_exploration_goal, unexplored_frontier, ExploreConfig};
pub use map::{Cell, CellClass, OccupancyMap};
pub use nav::{geodesic_field, plan_path, plan_path_to_any, rotations, step_yaw, NavAction, Path};
pub use objects::{default_attributes, Attribute, Detection, ObjectMemory, ObjectMemoryEntry};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpatialError {
    #[error("input error: {0}")]
    Input(String),
}

/// One segmented instance in a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentLabel {
    pub instance: String,
    pub category: String,
    pub score: f64,
}

/// Depth plus instance segmentation, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Planar depth in meters; values `<= 0` or `>= max_range` carry no return.
    pub depth: Vec<f64>,
    /// `0` is background, `i > 0` refers to `labels[i - 1]`.
    pub segmentation: Vec<u32>,
    pub labels: Vec<SegmentLabel>,
    pub max_range: f64,
}

impl Frame {
    pub fn is_valid_depth(&self, d: f64) -> bool {
        d > 0.0 && d < self.max_range && d.is_finite()
    }

    /// Instances with at least one pixel in the mask.
    pub fn visible_instances(&self) -> impl Iterator<Item = &SegmentLabel> {
        let mut seen = vec![false; self.labels.len()];
        for &s in &self.segmentation {
            if s > 0 {
                seen[s as usize - 1] = true;
            }
        }
        self.labels.iter().zip(seen).filter(|(_, s)| *s).map(|(l, _)| l)
    }

    pub fn shows(&self, instance: &str) -> bool {
        self.visible_instances().any(|l| l.instance == instance)
    }
}

/// Height levels used when projecting points onto the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightBands {
    /// Points below this are floor and mark their cell free.
    pub floor_max: f64,
    /// Points between `floor_max` and this mark their cell occupied; higher points are ignored.
    pub obstacle_max: f64,
}

impl Default for HeightBands {
    fn default() -> Self {
        Self { floor_max: 0.15, obstacle_max: 2.0 }
    }
}

/// What one frame added.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameSummary {
    pub free_points: usize,
    pub obstacle_points: usize,
    /// Memory indices touched by this frame's detections.
    pub detections: Vec<usize>,
}

/// Projects a frame into the map and inserts one detection per mask, at the
/// point of median depth inside the mask.
pub fn integrate_frame(
    map: &mut OccupancyMap,
    memory: &mut ObjectMemory,
    frame: &Frame,
    pose: &Pose,
    cam: &CameraModel,
    bands: HeightBands,
) -> Result<FrameSummary, SpatialError> {
    let n = frame.width * frame.height;
    if frame.depth.len() != n || frame.segmentation.len() != n {
        return Err(SpatialError::Input(format!(
            "frame {}x{} has {} depth and {} segmentation values",
            frame.width,
            frame.height,
            frame.depth.len(),
            frame.segmentation.len()
        )));
    }
    if frame.width != cam.width || frame.height != cam.height {
        return Err(SpatialError::Input("frame size differs from camera model".into()));
    }
    if frame.segmentation.iter().any(|&s| s as usize > frame.labels.len()) {
        return Err(SpatialError::Input("segmentation refers to a missing label".into()));
    }

    let origin = pose.translation();
    let mut summary = FrameSummary::default();
    let mut masks: Vec<Vec<(f64, usize)>> = vec![Vec::new(); frame.labels.len()];
    for (i, &d) in frame.depth.iter().enumerate() {
        if !frame.is_valid_depth(d) {
            continue;
        }
        let (row, col) = (i / frame.width, i % frame.width);
        let p = unproject(col as f64 + 0.5, row as f64 + 0.5, d, cam, pose)?;
        // Step just past the surface.
        let nudged = p.coords + (p.coords - origin).normalize() * 1e-6;
        if let Some(cell) = map.cell_of(nudged.x, nudged.z) {
            if nudged.y < bands.floor_max {
                map.add_free(cell);
                summary.free_points += 1;
            } else if nudged.y <= bands.obstacle_max {
                map.add_obstacle(cell);
                summary.obstacle_points += 1;
            }
        }
        let s = frame.segmentation[i];
        if s > 0 {
            masks[s as usize - 1].push((d, i));
        }
    }

    let mut seen = Vec::new();
    for (label, mut pixels) in frame.labels.iter().zip(masks) {
        if pixels.is_empty() {
            continue;
        }
        pixels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (d, i) = pixels[(pixels.len() - 1) / 2];
        let p = unproject((i % frame.width) as f64 + 0.5, (i / frame.width) as f64 + 0.5, d, cam, pose)?;
        let p = p.coords + (p.coords - origin).normalize() * 1e-6;
        memory.insert(Detection {
            category: label.category.clone(),
            centroid: [p.x, p.y, p.z],
            score: label.score,
            instance: Some(label.instance.clone()),
        });
        seen.push(label.instance.as_str());
    }
    summary.detections = seen.iter().filter_map(|i| memory.by_instance(i)).collect();
    Ok(summary)
}

/// Map and object memory for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialState {
    pub map: OccupancyMap,
    pub memory: ObjectMemory,
    pub bands: HeightBands,
}

impl SpatialState {
    pub fn new(rows: usize, cols: usize, resolution: f64) -> Self {
        Self { map: OccupancyMap::new(rows, cols, resolution), memory: ObjectMemory::default(), bands: HeightBands::default() }
    }

    pub fn integrate(&mut self, frame: &Frame, pose: &Pose, cam: &CameraModel) -> Result<FrameSummary, SpatialError> {
        integrate_frame(&mut self.map, &mut self.memory, frame, pose, cam, self.bands)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wall_frame(cam: &CameraModel, depth: f64) -> Frame {
        let n = cam.width * cam.height;
        Frame {
            width: cam.width,
            height: cam.height,
            depth: vec![depth; n],
            segmentation: vec![0; n],
            labels: vec![],
            max_range: 10.0,
        }
    }

    #[test]
    fn wall_plane_becomes_obstacle_row() {
        let cam = CameraModel::from_fov(32, 32, 90.0).unwrap();
        let pose = Pose::new([2.0, CAMERA_HEIGHT, 0.125], 0.0, 0.0).unwrap();
        let mut map = OccupancyMap::new(20, 20, 0.25);
        let mut mem = ObjectMemory::default();
        integrate_frame(&mut map, &mut mem, &wall_frame(&cam, 3.0), &pose, &cam, HeightBands::default()).unwrap();
        let row = ((0.125 + 3.0) / 0.25) as usize;
        let hit: Vec<usize> = (0..20).filter(|&c| map.class((row, c)) == CellClass::Obstacle).collect();
        assert!(!hit.is_empty());
        assert!(hit.windows(2).all(|w| w[1] == w[0] + 1), "contiguous");
        for r in 0..20 {
            if r != row {
                assert!((0..20).all(|c| map.class((r, c)) != CellClass::Obstacle));
            }
        }
    }

    #[test]
    fn invalid_frame_changes_nothing() {
        let cam = CameraModel::from_fov(8, 8, 90.0).unwrap();
        let mut map = OccupancyMap::new(5, 5, 0.25);
        let before = map.clone();
        let mut mem = ObjectMemory::default();
        let f = wall_frame(&cam, 0.0);
        integrate_frame(&mut map, &mut mem, &f, &Pose::identity(), &cam, HeightBands::default()).unwrap();
        assert_eq!(map, before);
        let f = wall_frame(&cam, 10.0);
        integrate_frame(&mut map, &mut mem, &f, &Pose::identity(), &cam, HeightBands::default()).unwrap();
        assert_eq!(map, before);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let cam = CameraModel::from_fov(8, 8, 90.0).unwrap();
        let mut f = wall_frame(&cam, 1.0);
        f.segmentation.pop();
        let r = integrate_frame(
            &mut OccupancyMap::new(5, 5, 0.25),
            &mut ObjectMemory::default(),
            &f,
            &Pose::identity(),
            &cam,
            HeightBands::default(),
        );
        assert!(matches!(r, Err(SpatialError::Input(_))));
    }
}
