//! Procedural road-scene disparity maps.
//!
//! A scene is a flat sky above the horizon, a ground plane whose disparity
//! grows linearly with the row below it, and a handful of fronto-parallel
//! boxes composited nearest-wins. All randomness comes from ChaCha8 streams
//! (`rand_chacha`) seeded through SplitMix64, so corpora are reproducible on
//! every platform and independent of generation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::DepthMap;
use crate::error::{Error, Result};
use crate::pca::TrainingSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub horizon_row: usize,
    /// Disparity gained per row below the horizon, px/row.
    pub ground_slope: f64,
    pub box_count: usize,
    /// `[min, max]` disparity of composited boxes.
    pub box_disparity_range: [f64; 2],
    pub sky_disparity: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 64,
            height: 20,
            horizon_row: 8,
            ground_slope: 2.0,
            box_count: 2,
            box_disparity_range: [4.0, 20.0],
            sky_disparity: 0.5,
            noise_std: 0.2,
            seed: 0,
        }
    }
}

impl SceneParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("scene dimensions must be positive"));
        }
        if self.horizon_row >= self.height {
            return Err(Error::invalid(format!(
                "horizon_row {} must be below height {}",
                self.horizon_row, self.height
            )));
        }
        if !(self.ground_slope.is_finite() && self.ground_slope > 0.0) {
            return Err(Error::invalid("ground_slope must be finite and positive"));
        }
        let [lo, hi] = self.box_disparity_range;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
            return Err(Error::invalid("box_disparity_range must satisfy 0 <= min <= max"));
        }
        if !(self.sky_disparity.is_finite() && self.sky_disparity >= 0.0) {
            return Err(Error::invalid("sky_disparity must be finite and non-negative"));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::invalid("noise_std must be finite and non-negative"));
        }
        Ok(())
    }

    /// Noise-free sky/ground disparity at `row`.
    pub fn background(&self, row: usize) -> f64 {
        if row < self.horizon_row {
            self.sky_disparity
        } else {
            self.ground_slope * (row - self.horizon_row) as f64 + self.sky_disparity
        }
    }
}

/// An axis-aligned box, inclusive pixel bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneBox {
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
    pub disparity: f64,
}

/// Box geometry for `params`; boxes stand on the ground, i.e. their bottom
/// edge lies at or below the horizon.
pub fn draw_boxes(params: &SceneParams, rng: &mut ChaCha8Rng) -> Vec<SceneBox> {
    let (w, h) = (params.width, params.height);
    let [lo, hi] = params.box_disparity_range;
    (0..params.box_count)
        .map(|_| {
            let disparity = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            let bw = rng.random_range((w / 12).max(1)..=(w / 4).max(1));
            let bh = rng.random_range((h / 6).max(1)..=(h / 2).max(1));
            let left = rng.random_range(0..=w - bw);
            let bottom = rng.random_range(params.horizon_row..h);
            SceneBox {
                top: (bottom + 1).saturating_sub(bh),
                bottom,
                left,
                right: left + bw - 1,
                disparity,
            }
        })
        .collect()
}

pub fn generate_scene(params: &SceneParams) -> Result<DepthMap> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut values: Vec<f64> = (0..h)
        .flat_map(|r| std::iter::repeat_n(params.background(r), w))
        .collect();
    for b in draw_boxes(params, &mut rng) {
        for r in b.top..=b.bottom {
            for c in b.left..=b.right {
                let v = &mut values[r * w + c];
                if b.disparity > *v {
                    *v = b.disparity;
                }
            }
        }
    }
    if params.noise_std > 0.0 {
        for v in &mut values {
            let n: f64 = rng.sample(StandardNormal);
            *v = (*v + params.noise_std * n).max(0.0);
        }
    }
    DepthMap::new(w, h, values)
}

/// Relative spreads: each jittered field becomes `base * (1 + spread * u)`
/// with `u` uniform in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Jitter {
    pub horizon_row: f64,
    pub ground_slope: f64,
    pub box_count: f64,
    pub sky_disparity: f64,
}

impl Jitter {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("horizon_row", self.horizon_row),
            ("ground_slope", self.ground_slope),
            ("box_count", self.box_count),
            ("sky_disparity", self.sky_disparity),
        ] {
            if !(v.is_finite() && (0.0..1.0).contains(&v)) {
                return Err(Error::invalid(format!("jitter.{name} must lie in [0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of scene `index` in a corpus seeded with `seed`.
pub fn scene_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Parameters of scene `index`, jittered around `base`.
pub fn jittered_params(base: &SceneParams, jitter: &Jitter, seed: u64, index: u64) -> SceneParams {
    let s = scene_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let mut draw = |base: f64, spread: f64| {
        let u: f64 = rng.random_range(-1.0..=1.0);
        base * (1.0 + spread * u)
    };
    let horizon = draw(base.horizon_row as f64, jitter.horizon_row).round();
    let slope = draw(base.ground_slope, jitter.ground_slope);
    let boxes = draw(base.box_count as f64, jitter.box_count).round();
    let sky = draw(base.sky_disparity, jitter.sky_disparity);
    SceneParams {
        horizon_row: (horizon.max(0.0) as usize).min(base.height - 1),
        ground_slope: slope,
        box_count: boxes.max(0.0) as usize,
        sky_disparity: sky,
        seed: splitmix64(s),
        ..base.clone()
    }
}

/// `n` scenes jittered around `base`; any `n >= 1`.
pub fn generate_scenes(n: usize, base: &SceneParams, jitter: &Jitter, seed: u64) -> Result<Vec<DepthMap>> {
    base.validate()?;
    jitter.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| generate_scene(&jittered_params(base, jitter, seed, i)))
        .collect()
}

pub fn generate_training_set(n: usize, base: &SceneParams, jitter: &Jitter, seed: u64) -> Result<TrainingSet> {
    if n < 2 {
        return Err(Error::invalid(format!("training set needs at least 2 scenes, got {n}")));
    }
    TrainingSet::new(generate_scenes(n, base, jitter, seed)?)
}
