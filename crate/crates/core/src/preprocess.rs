//! Training-map preparation: invalid-pixel fill and box blur.

use rayon::prelude::*;

use crate::depth::{is_valid, DepthMap};
use crate::error::{Error, Result};
use crate::nearest::nearest_fill;

pub const DEFAULT_BLUR_KERNEL: usize = 5;

/// Replaces every invalid pixel with its nearest valid neighbour
/// (Euclidean pixel distance, lowest row-major index on ties).
pub fn fill_invalid_nearest(map: &DepthMap) -> Result<DepthMap> {
    let sources: Vec<(usize, f64)> = map
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| is_valid(**v))
        .map(|(i, v)| (i, *v))
        .collect();
    if sources.is_empty() {
        return Err(Error::invalid("cannot fill a map with no valid pixels"));
    }
    if sources.len() == map.len() {
        return Ok(map.clone());
    }
    let values = nearest_fill(map.width(), map.height(), &sources);
    DepthMap::new(map.width(), map.height(), values)
}

/// Mean over a `kernel x kernel` window with clamped (edge-replicated)
/// coordinates. Implemented as two separable 1D passes.
pub fn box_blur(map: &DepthMap, kernel: usize) -> Result<DepthMap> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "box blur kernel must be odd and positive, got {kernel}"
        )));
    }
    map.require_fully_valid()?;
    if kernel == 1 {
        return Ok(map.clone());
    }
    let (w, h) = (map.width(), map.height());
    let half = (kernel / 2) as isize;
    let norm = kernel as f64;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let src = map.values();

    let mut horiz = vec![0.0; w * h];
    horiz.par_chunks_mut(w).enumerate().for_each(|(r, dst)| {
        let row = &src[r * w..(r + 1) * w];
        for (c, o) in dst.iter_mut().enumerate() {
            let sum: f64 = (-half..=half).map(|k| row[clamp(c as isize + k, w)]).sum();
            *o = sum / norm;
        }
    });

    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(r, dst)| {
        for (c, o) in dst.iter_mut().enumerate() {
            let sum: f64 = (-half..=half)
                .map(|k| horiz[clamp(r as isize + k, h) * w + c])
                .sum();
            *o = sum / norm;
        }
    });
    DepthMap::new(w, h, out)
}

/// Fill then blur, the order used for training maps.
pub fn prepare_training_map(map: &DepthMap, blur_kernel: Option<usize>) -> Result<DepthMap> {
    let filled = fill_invalid_nearest(map)?;
    match blur_kernel {
        Some(k) => box_blur(&filled, k),
        None => Ok(filled),
    }
}
