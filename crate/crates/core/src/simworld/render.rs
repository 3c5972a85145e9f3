use std::collections::HashMap;

use super::world::{Aabb, Tile, World, WALL_HEIGHT};
use crate::spatial::{pixel_ray, CameraModel, Cell, Frame, Pose, SegmentLabel};

/// Depth reported for rays that hit nothing.
pub const MAX_RANGE: f64 = 10.0;

/// Entry parameter of `origin + t * dir` into `b`, if it is hit at `t >= 0`.
fn slab(origin: [f64; 3], dir: [f64; 3], b: &Aabb) -> Option<f64> {
    let (mut t0, mut t1) = (0.0_f64, f64::INFINITY);
    for i in 0..3 {
        if dir[i].abs() < 1e-12 {
            if origin[i] < b.min[i] || origin[i] > b.max[i] {
                return None;
            }
            continue;
        }
        let a = (b.min[i] - origin[i]) / dir[i];
        let c = (b.max[i] - origin[i]) / dir[i];
        t0 = t0.max(a.min(c));
        t1 = t1.min(a.max(c));
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}

/// Ray-casts depth and instance segmentation through the grid.
pub fn render(world: &World, pose: &Pose, cam: &CameraModel) -> Frame {
    let cs = world.cell_size;
    let mut labels = Vec::new();
    let mut boxes: HashMap<Cell, Vec<(Aabb, u32)>> = HashMap::new();
    for obj in world.objects() {
        let Some(b) = world.bounds(&obj.id) else { continue };
        let c = b.center();
        let cell = ((c[2] / cs).floor() as usize, (c[0] / cs).floor() as usize);
        labels.push(SegmentLabel { instance: obj.id.clone(), category: obj.category.clone(), score: 1.0 });
        boxes.entry(cell).or_default().push((b, labels.len() as u32));
    }

    let (rows, cols) = (world.rows() as i64, world.cols() as i64);
    let origin = pose.position;
    let n = cam.width * cam.height;
    let mut depth = vec![MAX_RANGE; n];
    let mut segmentation = vec![0u32; n];

    for v in 0..cam.height {
        for u in 0..cam.width {
            let d = pixel_ray(u as f64 + 0.5, v as f64 + 0.5, cam, pose);
            let dir = [d.x, d.y, d.z];
            let mut r = (origin[2] / cs).floor() as i64;
            let mut c = (origin[0] / cs).floor() as i64;
            let step_c: i64 = if dir[0] > 0.0 { 1 } else { -1 };
            let step_r: i64 = if dir[2] > 0.0 { 1 } else { -1 };
            let axis_t = |o: f64, k: i64, dk: f64| {
                if dk.abs() < 1e-12 {
                    f64::INFINITY
                } else {
                    let edge = if dk > 0.0 { (k + 1) as f64 * cs } else { k as f64 * cs };
                    (edge - o) / dk
                }
            };
            let mut t_next_c = axis_t(origin[0], c, dir[0]);
            let mut t_next_r = axis_t(origin[2], r, dir[2]);
            let dt_c = if dir[0].abs() < 1e-12 { f64::INFINITY } else { cs / dir[0].abs() };
            let dt_r = if dir[2].abs() < 1e-12 { f64::INFINITY } else { cs / dir[2].abs() };
            let mut t_enter = 0.0;

            let idx = v * cam.width + u;
            while r >= 0 && c >= 0 && r < rows && c < cols && t_enter < MAX_RANGE {
                let t_exit = t_next_c.min(t_next_r);
                let cell = (r as usize, c as usize);
                let mut best: Option<(f64, u32)> = None;
                let mut consider = |t: f64, label: u32| {
                    if best.is_none_or(|(bt, _)| t < bt) {
                        best = Some((t, label));
                    }
                };
                if world.tile(cell) == Some(Tile::Wall) {
                    let wall = Aabb {
                        min: [c as f64 * cs, 0.0, r as f64 * cs],
                        max: [(c + 1) as f64 * cs, WALL_HEIGHT, (r + 1) as f64 * cs],
                    };
                    if let Some(t) = slab(origin, dir, &wall) {
                        consider(t, 0);
                    }
                }
                for (b, label) in boxes.get(&cell).into_iter().flatten() {
                    if let Some(t) = slab(origin, dir, b) {
                        consider(t, *label);
                    }
                }
                if dir[1] < 0.0 {
                    let tf = -origin[1] / dir[1];
                    if tf >= t_enter - 1e-9 && tf <= t_exit + 1e-9 {
                        consider(tf, 0);
                    }
                }
                if let Some((t, label)) = best {
                    if t < MAX_RANGE {
                        depth[idx] = t;
                        segmentation[idx] = label;
                    }
                    break;
                }
                t_enter = t_exit;
                if t_next_c < t_next_r {
                    c += step_c;
                    t_next_c += dt_c;
                } else {
                    r += step_r;
                    t_next_r += dt_r;
                }
            }
        }
    }
    Frame { width: cam.width, height: cam.height, depth, segmentation, labels, max_range: MAX_RANGE }
}
