use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::SpatialError;

/// Height of the camera above the floor, in meters.
pub const CAMERA_HEIGHT: f64 = 0.9015;

/// Pinhole intrinsics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub fov_deg: f64,
}

impl CameraModel {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self, SpatialError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(SpatialError::Input("focal lengths must be positive".into()));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(SpatialError::Input("principal point outside the image".into()));
        }
        let fov_deg = 2.0 * (width as f64 / (2.0 * fx)).atan().to_degrees();
        Ok(Self { fx, fy, cx, cy, width, height, fov_deg })
    }

    /// Square pixels, centred principal point, horizontal field of view.
    pub fn from_fov(width: usize, height: usize, fov_deg: f64) -> Result<Self, SpatialError> {
        if width == 0 || height == 0 || !(fov_deg > 0.0 && fov_deg < 180.0) {
            return Err(SpatialError::Input("invalid image size or field of view".into()));
        }
        let f = width as f64 / 2.0 / (fov_deg.to_radians() / 2.0).tan();
        Self::new(f, f, width as f64 / 2.0, height as f64 / 2.0, width, height)
    }
}

impl Default for CameraModel {
    fn default() -> Self {
        Self::from_fov(480, 480, 90.0).expect("valid default camera")
    }
}

/// Camera pose. The world is y-up; yaw 0 looks along +z, yaw 90 along +x,
/// positive pitch looks down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    pub yaw_deg: f64,
    pub pitch_deg: f64,
}

impl Pose {
    pub fn new(position: [f64; 3], yaw_deg: f64, pitch_deg: f64) -> Result<Self, SpatialError> {
        if position.iter().any(|v| !v.is_finite()) {
            return Err(SpatialError::Input("non-finite position".into()));
        }
        if ![0.0, 90.0, 180.0, 270.0].contains(&yaw_deg) {
            return Err(SpatialError::Input(format!("yaw {yaw_deg} not in {{0, 90, 180, 270}}")));
        }
        if pitch_deg % 30.0 != 0.0 || !(-60.0..=60.0).contains(&pitch_deg) {
            return Err(SpatialError::Input(format!("pitch {pitch_deg} not a multiple of 30 in [-60, 60]")));
        }
        Ok(Self { position, yaw_deg, pitch_deg })
    }

    pub fn identity() -> Self {
        Self { position: [0.0; 3], yaw_deg: 0.0, pitch_deg: 0.0 }
    }

    /// Columns are the camera's right, down and forward axes in world
    /// coordinates.
    pub fn rotation(&self) -> Matrix3<f64> {
        let (sy, cy) = self.yaw_deg.to_radians().sin_cos();
        let (sp, cp) = self.pitch_deg.to_radians().sin_cos();
        let right = Vector3::new(cy, 0.0, -sy);
        let down = Vector3::new(-sy * sp, -cp, -cy * sp);
        let forward = Vector3::new(sy * cp, -sp, cy * cp);
        Matrix3::from_columns(&[right, down, forward])
    }

    pub fn translation(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    pub fn forward(&self) -> Vector3<f64> {
        self.rotation().column(2).into()
    }
}

/// Back-projects pixel `(u, v)` at planar depth `z` into world coordinates.
pub fn unproject(u: f64, v: f64, z: f64, cam: &CameraModel, pose: &Pose) -> Result<Point3<f64>, SpatialError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpatialError::Input(format!("depth must be positive, got {z}")));
    }
    if !(0.0..=cam.width as f64).contains(&u) || !(0.0..=cam.height as f64).contains(&v) {
        return Err(SpatialError::Input(format!("pixel ({u}, {v}) outside the image")));
    }
    let p_cam = Vector3::new(z * (u - cam.cx) / cam.fx, z * (v - cam.cy) / cam.fy, z);
    Ok(Point3::from(pose.rotation() * p_cam + pose.translation()))
}

/// Forward pinhole projection; returns `(u, v, depth)`, or `None` behind the camera.
pub fn project(point: &Point3<f64>, cam: &CameraModel, pose: &Pose) -> Option<(f64, f64, f64)> {
    let p = pose.rotation().transpose() * (point.coords - pose.translation());
    if p.z <= 0.0 {
        return None;
    }
    Some((cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy, p.z))
}

/// World-space direction of the ray through pixel `(u, v)` with unit planar depth.
pub fn pixel_ray(u: f64, v: f64, cam: &CameraModel, pose: &Pose) -> Vector3<f64> {
    pose.rotation() * Vector3::new((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0)
}
