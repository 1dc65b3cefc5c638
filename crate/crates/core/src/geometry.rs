//! Pinhole stereo geometry used for evaluation.

use nalgebra::{Matrix3, Point2, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pinhole intrinsics plus the stereo baseline used for disparity conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Stereo baseline in meters.
    pub baseline: f64,
    /// Focal length in px used by `w = b f / d`; normally `fx`.
    pub focal: f64,
}

impl CameraModel {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, baseline: f64, focal: f64) -> Result<Self> {
        let cam = Self {
            fx,
            fy,
            cx,
            cy,
            baseline,
            focal,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.fx, self.fy, self.cx, self.cy, self.baseline, self.focal]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("camera parameters must be finite"));
        }
        if !(self.fx > 0.0 && self.fy > 0.0 && self.focal > 0.0) {
            return Err(Error::invalid("focal lengths must be positive"));
        }
        if !(self.baseline > 0.0) {
            return Err(Error::invalid("baseline must be positive"));
        }
        Ok(())
    }

    pub fn intrinsics(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    /// `b * f`, in px * m.
    pub fn disparity_scale(&self) -> f64 {
        self.baseline * self.focal
    }
}

/// `X_B = R X_A + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        if rotation.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("rigid transform must be finite"));
        }
        let ortho = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if ortho > 1e-9 {
            return Err(Error::invalid(format!(
                "rotation is not orthonormal (max |R^T R - I| = {ortho:e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("rotation determinant is {det}, expected 1")));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: t,
        }
    }

    /// Pose of the right camera of a rectified stereo pair seen from the left.
    pub fn stereo_right(baseline: f64) -> Self {
        Self::from_translation(Vector3::new(-baseline, 0.0, 0.0))
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &RigidTransform) -> Self {
        Self {
            rotation: self.rotation * first.rotation,
            translation: self.rotation * first.translation + self.translation,
        }
    }

    /// 4x4 homogeneous matrix, row-major.
    pub fn to_homogeneous(&self) -> [[f64; 4]; 4] {
        let (r, t) = (&self.rotation, &self.translation);
        [
            [r[(0, 0)], r[(0, 1)], r[(0, 2)], t[0]],
            [r[(1, 0)], r[(1, 1)], r[(1, 2)], t[1]],
            [r[(2, 0)], r[(2, 1)], r[(2, 2)], t[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }
}

/// `w = b f / d`.
pub fn disparity_to_depth(disparity: f64, cam: &CameraModel) -> Result<f64> {
    if !(disparity > 0.0) || !disparity.is_finite() {
        return Err(Error::invalid(format!(
            "disparity must be positive to convert to depth, got {disparity}"
        )));
    }
    Ok(cam.disparity_scale() / disparity)
}

/// `d = b f / w`.
pub fn depth_to_disparity(depth: f64, cam: &CameraModel) -> Result<f64> {
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(Error::invalid(format!(
            "depth must be positive to convert to disparity, got {depth}"
        )));
    }
    Ok(cam.disparity_scale() / depth)
}

/// `X = w K^-1 (x, 1)`.
pub fn backproject(x: Point2<f64>, depth: f64, cam: &CameraModel) -> Result<Point3<f64>> {
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(Error::invalid(format!("backprojection depth must be positive, got {depth}")));
    }
    Ok(Point3::new(
        depth * (x.x - cam.cx) / cam.fx,
        depth * (x.y - cam.cy) / cam.fy,
        depth,
    ))
}

pub fn transform_point(pose: &RigidTransform, p: &Point3<f64>) -> Point3<f64> {
    Point3::from(pose.rotation * p.coords + pose.translation)
}

/// Perspective projection `pi(X)`.
pub fn project_pi(cam: &CameraModel, p: &Point3<f64>) -> Result<Point2<f64>> {
    if !(p.z > 0.0) {
        return Err(Error::NotVisible(format!("point has depth {} <= 0", p.z)));
    }
    Ok(Point2::new(
        cam.fx * p.x / p.z + cam.cx,
        cam.fy * p.y / p.z + cam.cy,
    ))
}

/// Euclidean 3D distance in meters.
pub fn error_3d(a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    (a - b).norm()
}

/// Euclidean image-plane distance in px.
pub fn error_2d(a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    (a - b).norm()
}
