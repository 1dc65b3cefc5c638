//! TOML parameter files for cameras, poses and synthetic scenes.
//!
//! ```toml
//! # camera
//! fx = 721.5
//! fy = 721.5
//! cx = 609.6
//! cy = 172.9
//! baseline = 0.54
//! focal = 721.5    # optional, defaults to fx
//!
//! # pose
//! rotation = [1, 0, 0, 0, 1, 0, 0, 0, 1]   # row-major
//! translation = [-0.54, 0, 0]              # meters
//! ```

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{read_all, write_atomic};
use crate::error::{Error, Result};
use crate::geometry::{CameraModel, RigidTransform};
use crate::synth::{Jitter, SceneParams};

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = read_all(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        reason: "file is not UTF-8".into(),
    })?;
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start.min(text.len())].lines().count().max(1) as u64);
        Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: e.message().to_string(),
        }
    })
}

fn invalid_at(path: &Path, e: Error) -> Error {
    match e {
        Error::InvalidInput(reason) => Error::InvariantViolation {
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraFile {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    baseline: f64,
    focal: Option<f64>,
}

pub fn read_camera(path: impl AsRef<Path>) -> Result<CameraModel> {
    let path = path.as_ref();
    let f: CameraFile = read_toml(path)?;
    CameraModel::new(f.fx, f.fy, f.cx, f.cy, f.baseline, f.focal.unwrap_or(f.fx))
        .map_err(|e| invalid_at(path, e))
}

pub fn write_camera(cam: &CameraModel, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(cam).map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path.as_ref(), |w| w.write_all(text.as_bytes()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseFile {
    rotation: [f64; 9],
    translation: [f64; 3],
}

pub fn read_pose(path: impl AsRef<Path>) -> Result<RigidTransform> {
    let path = path.as_ref();
    let f: PoseFile = read_toml(path)?;
    RigidTransform::new(
        Matrix3::from_row_slice(&f.rotation),
        Vector3::from_row_slice(&f.translation),
    )
    .map_err(|e| invalid_at(path, e))
}

pub fn write_pose(pose: &RigidTransform, path: impl AsRef<Path>) -> Result<()> {
    let r = pose.rotation();
    let mut rotation = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            rotation[i * 3 + j] = r[(i, j)];
        }
    }
    let t = pose.translation();
    let f = PoseFile {
        rotation,
        translation: [t[0], t[1], t[2]],
    };
    let text = toml::to_string(&f).map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path.as_ref(), |w| w.write_all(text.as_bytes()))
}

/// Scene parameter file: [`SceneParams`] fields at top level plus an
/// optional `[jitter]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(flatten)]
    pub scene: SceneParams,
    #[serde(default)]
    pub jitter: Jitter,
}

pub fn read_scene_file(path: impl AsRef<Path>) -> Result<SceneFile> {
    let path = path.as_ref();
    let f: SceneFile = read_toml(path)?;
    f.scene.validate().map_err(|e| invalid_at(path, e))?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camera_and_pose_files() {
        let dir = tempfile::tempdir().unwrap();
        let cam_path = dir.path().join("cam.toml");
        std::fs::write(&cam_path, "fx = 700\nfy = 710\ncx = 320\ncy = 240\nbaseline = 0.5\n").unwrap();
        let cam = read_camera(&cam_path).unwrap();
        assert_eq!(cam.focal, 700.0);
        write_camera(&cam, &cam_path).unwrap();
        assert_eq!(read_camera(&cam_path).unwrap(), cam);

        let pose_path = dir.path().join("pose.toml");
        std::fs::write(
            &pose_path,
            "rotation = [1, 0, 0, 0, 1, 0, 0, 0, 1]\ntranslation = [-0.5, 0, 0]\n",
        )
        .unwrap();
        let pose = read_pose(&pose_path).unwrap();
        assert_eq!(pose, RigidTransform::stereo_right(0.5));
        write_pose(&pose, &pose_path).unwrap();
        assert_eq!(read_pose(&pose_path).unwrap(), pose);
    }

    #[test]
    fn bad_parameter_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cam.toml");
        std::fs::write(&p, "fx = 700\nfy = 710\ncx = 320\ncy = 240\nbaseline = -1\n").unwrap();
        assert!(matches!(read_camera(&p), Err(Error::InvariantViolation { .. })));
        std::fs::write(&p, "fx = 700\nfy = \n").unwrap();
        assert!(matches!(read_camera(&p), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&p, "rotation = [2, 0, 0, 0, 1, 0, 0, 0, 1]\ntranslation = [0, 0, 0]\n").unwrap();
        assert!(matches!(read_pose(&p), Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn scene_file_with_jitter() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scene.toml");
        std::fs::write(
            &p,
            "width = 32\nheight = 12\nhorizon_row = 4\nground_slope = 1.5\nbox_count = 1\n\
             box_disparity_range = [2.0, 9.0]\nsky_disparity = 0.3\nnoise_std = 0.0\nseed = 5\n\
             [jitter]\nground_slope = 0.2\n",
        )
        .unwrap();
        let f = read_scene_file(&p).unwrap();
        assert_eq!(f.scene.width, 32);
        assert_eq!(f.jitter.ground_slope, 0.2);
        assert_eq!(f.jitter.horizon_row, 0.0);
    }
}
