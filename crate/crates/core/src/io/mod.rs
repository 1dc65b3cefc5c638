//! On-disk formats: PCA bases, depth maps, sparse measurements, camera and
//! pose parameters, evaluation reports.
//!
//! Every writer goes through [`write_atomic`]: output lands in a temporary
//! file next to the target and is renamed into place only on success.

mod basis;
mod depth;
mod params;
mod report;
mod sparse;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use basis::{encode_basis, load_basis, load_basis_prefix, save_basis, BASIS_MAGIC, BASIS_VERSION};
pub use depth::{read_depth, read_field, write_depth, DepthFormat};
pub use params::{read_camera, read_pose, read_scene_file, write_camera, write_pose, SceneFile};
pub use report::{read_report, write_per_point_csv, write_report};
pub use sparse::{read_sparse, write_sparse, SPARSE_HEADER};

/// Writes `path` via a sibling temporary file and an atomic rename.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::Builder::new()
        .prefix(".pcadepth-")
        .tempfile_in(dir)
        .map_err(|e| Error::io(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_all(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}
