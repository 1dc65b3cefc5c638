//! Sample selection and Δ2D / Δ3D evaluation of dense reconstructions.

use nalgebra::Point2;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densify::Reconstruction;
use crate::depth::{is_valid, DepthMap, Pixel};
use crate::error::{Error, Result};
use crate::geometry::{
    backproject, disparity_to_depth, error_2d, error_3d, project_pi, transform_point, CameraModel,
    RigidTransform,
};

/// Minimum Euclidean spacing, in px, between gradient-ranked samples.
pub const GRADIENT_MIN_SPACING: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStrategy {
    /// `k` distinct valid pixels drawn uniformly with ChaCha8 seeded by `seed`.
    UniformRandom { k: usize, seed: u64 },
    /// Every valid pixel whose row and column are multiples of `step`.
    Grid { step: usize },
    /// The `k` strongest finite-difference gradients, greedily spaced.
    GradientTop { k: usize },
}

/// Picks measurement locations; output is sorted row-major except for
/// `GradientTop`, which is in descending score order.
pub fn select_samples(map: &DepthMap, strategy: SampleStrategy) -> Result<Vec<Pixel>> {
    let w = map.width();
    let valid: Vec<usize> = (0..map.len()).filter(|&i| is_valid(map.values()[i])).collect();
    let to_px = |i: usize| Pixel::new(i / w, i % w);
    match strategy {
        SampleStrategy::UniformRandom { k, seed } => {
            if k == 0 {
                return Err(Error::invalid("sample count k must be at least 1"));
            }
            if valid.len() < k {
                return Err(Error::invalid(format!(
                    "requested {k} samples but only {} valid pixels",
                    valid.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = index::sample(&mut rng, valid.len(), k)
                .into_iter()
                .map(|i| valid[i])
                .collect();
            picked.sort_unstable();
            Ok(picked.into_iter().map(to_px).collect())
        }
        SampleStrategy::Grid { step } => {
            if step == 0 {
                return Err(Error::invalid("grid step must be at least 1"));
            }
            let picked: Vec<Pixel> = valid
                .into_iter()
                .map(to_px)
                .filter(|p| p.row % step == 0 && p.col % step == 0)
                .collect();
            if picked.is_empty() {
                return Err(Error::invalid("grid selected no valid pixels"));
            }
            Ok(picked)
        }
        SampleStrategy::GradientTop { k } => {
            if k == 0 {
                return Err(Error::invalid("sample count k must be at least 1"));
            }
            if valid.len() < k {
                return Err(Error::invalid(format!(
                    "requested {k} samples but only {} valid pixels",
                    valid.len()
                )));
            }
            let mut scored: Vec<(f64, usize)> =
                valid.iter().map(|&i| (gradient_magnitude(map, i), i)).collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let min_d2 = GRADIENT_MIN_SPACING * GRADIENT_MIN_SPACING;
            let mut picked: Vec<Pixel> = Vec::with_capacity(k);
            for (_, i) in scored {
                let p = to_px(i);
                let spaced = picked.iter().all(|q| {
                    let dr = p.row as f64 - q.row as f64;
                    let dc = p.col as f64 - q.col as f64;
                    dr * dr + dc * dc >= min_d2
                });
                if spaced {
                    picked.push(p);
                    if picked.len() == k {
                        return Ok(picked);
                    }
                }
            }
            Err(Error::invalid(format!(
                "only {} of {k} samples fit at {GRADIENT_MIN_SPACING} px spacing",
                picked.len()
            )))
        }
    }
}

/// Central differences, falling back to one-sided ones at borders and next to
/// invalid pixels.
fn gradient_magnitude(map: &DepthMap, i: usize) -> f64 {
    let (w, h) = (map.width(), map.height());
    let (r, c) = (i / w, i % w);
    let v = map.values();
    let at = |rr: usize, cc: usize| {
        let x = v[rr * w + cc];
        if is_valid(x) {
            Some(x)
        } else {
            None
        }
    };
    let diff = |lo: Option<f64>, hi: Option<f64>| match (lo, hi) {
        (Some(a), Some(b)) => (b - a) / 2.0,
        (Some(a), None) => v[i] - a,
        (None, Some(b)) => b - v[i],
        (None, None) => 0.0,
    };
    let left = if c > 0 { at(r, c - 1) } else { None };
    let right = if c + 1 < w { at(r, c + 1) } else { None };
    let up = if r > 0 { at(r - 1, c) } else { None };
    let down = if r + 1 < h { at(r + 1, c) } else { None };
    diff(left, right).hypot(diff(up, down))
}

/// Which pixels to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalPoints {
    /// Every pixel, for synthetic ground truth.
    All,
    Pixels(Vec<Pixel>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum UncertaintyBins {
    None,
    /// `n` bins at the empirical quantiles of the evaluated uncertainties.
    Quantiles(usize),
    /// Explicit lower edges.
    Edges(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinConfig {
    pub uncertainty: UncertaintyBins,
    /// Lower edges in meters; the last bin is open-ended.
    pub depth_edges: Vec<f64>,
}

impl Default for BinConfig {
    fn default() -> Self {
        Self {
            uncertainty: UncertaintyBins::Quantiles(5),
            depth_edges: vec![0.0, 10.0, 25.0, 50.0, 100.0],
        }
    }
}

/// One evaluated pixel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub row: usize,
    pub col: usize,
    pub delta2d: f64,
    pub delta3d: f64,
    pub uncertainty: Option<f64>,
    pub ref_depth: f64,
}

/// Bin `i` covers `[edges[i], edges[i + 1])`; the last bin is open above and
/// values below `edges[0]` land in bin 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub means: Vec<Option<f64>>,
}

impl Histogram {
    pub fn build(edges: Vec<f64>, samples: impl Iterator<Item = (f64, f64)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::invalid("histogram needs at least one edge"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("bin edges must be finite and strictly increasing"));
        }
        let mut counts = vec![0usize; edges.len()];
        let mut sums = vec![0.0; edges.len()];
        for (key, value) in samples {
            let b = edges.partition_point(|e| *e <= key).saturating_sub(1);
            counts[b] += 1;
            sums[b] += value;
        }
        let means = counts
            .iter()
            .zip(&sums)
            .map(|(&c, &s)| (c > 0).then(|| s / c as f64))
            .collect();
        Ok(Self {
            edges,
            counts,
            means,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Lower edges at the `i / bins` quantiles, duplicates removed.
pub fn quantile_edges(values: &[f64], bins: usize) -> Vec<f64> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut edges: Vec<f64> = Vec::with_capacity(bins);
    for i in 0..bins {
        let e = sorted[i * sorted.len() / bins];
        if edges.last().is_none_or(|last| e > *last) {
            edges.push(e);
        }
    }
    edges
}

/// Aggregate part of an [`EvalReport`]; this is what gets written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub points: usize,
    /// Points with a valid reference that failed the visibility test.
    pub discarded: usize,
    /// Requested points without a valid reference disparity.
    pub invalid_reference: usize,
    pub mean_delta2d: Option<f64>,
    pub mean_delta3d: Option<f64>,
    pub delta2d_by_uncertainty: Option<Histogram>,
    pub delta2d_by_depth: Histogram,
    pub delta3d_by_depth: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub records: Vec<PointRecord>,
    pub summary: ReportSummary,
}

impl EvalReport {
    pub fn from_records(
        records: Vec<PointRecord>,
        discarded: usize,
        invalid_reference: usize,
        bins: &BinConfig,
    ) -> Result<Self> {
        let n = records.len();
        let mean = |f: fn(&PointRecord) -> f64| {
            (n > 0).then(|| records.iter().map(f).sum::<f64>() / n as f64)
        };
        let delta2d_by_uncertainty = match &bins.uncertainty {
            UncertaintyBins::None => None,
            spec => {
                let unc: Vec<f64> = records
                    .iter()
                    .map(|r| {
                        r.uncertainty.ok_or_else(|| {
                            Error::invalid("uncertainty binning requested but no uncertainty image given")
                        })
                    })
                    .collect::<Result<_>>()?;
                let edges = match spec {
                    UncertaintyBins::Quantiles(q) => {
                        let e = quantile_edges(&unc, *q);
                        if e.is_empty() {
                            vec![0.0]
                        } else {
                            e
                        }
                    }
                    UncertaintyBins::Edges(e) => e.clone(),
                    UncertaintyBins::None => unreachable!(),
                };
                Some(Histogram::build(
                    edges,
                    records.iter().zip(&unc).map(|(r, u)| (*u, r.delta2d)),
                )?)
            }
        };
        let summary = ReportSummary {
            points: n,
            discarded,
            invalid_reference,
            mean_delta2d: mean(|r| r.delta2d),
            mean_delta3d: mean(|r| r.delta3d),
            delta2d_by_uncertainty,
            delta2d_by_depth: Histogram::build(
                bins.depth_edges.clone(),
                records.iter().map(|r| (r.ref_depth, r.delta2d)),
            )?,
            delta3d_by_depth: Histogram::build(
                bins.depth_edges.clone(),
                records.iter().map(|r| (r.ref_depth, r.delta3d)),
            )?,
        };
        Ok(Self { records, summary })
    }

    /// Concatenates the per-point records of several frames and rebins them.
    pub fn pooled(reports: &[EvalReport], bins: &BinConfig) -> Result<Self> {
        let records = reports.iter().flat_map(|r| r.records.iter().copied()).collect();
        let discarded = reports.iter().map(|r| r.summary.discarded).sum();
        let invalid = reports.iter().map(|r| r.summary.invalid_reference).sum();
        Self::from_records(records, discarded, invalid, bins)
    }
}

enum Outcome {
    Kept(PointRecord),
    Discarded,
    InvalidReference,
}

/// Compares an estimated disparity map against a reference by lifting both
/// to 3D, moving them into a second view and projecting.
///
/// A point survives only if its reference disparity is valid and both the
/// reference and the estimate land in front of the second camera and inside
/// the image, i.e. round to an existing pixel: `[-0.5, width - 0.5) x
/// [-0.5, height - 0.5)` with pixel centers at integer coordinates.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_frame(
    estimate: &DepthMap,
    uncertainty: Option<&DepthMap>,
    reference: &DepthMap,
    cam: &CameraModel,
    pose: &RigidTransform,
    points: &EvalPoints,
    bins: &BinConfig,
) -> Result<EvalReport> {
    cam.validate()?;
    estimate.require_shape(reference.width(), reference.height())?;
    if let Some(u) = uncertainty {
        u.require_shape(reference.width(), reference.height())?;
    }
    if bins.uncertainty != UncertaintyBins::None && uncertainty.is_none() {
        return Err(Error::invalid(
            "uncertainty binning requested but no uncertainty image given",
        ));
    }
    let pixels: Vec<Pixel> = match points {
        EvalPoints::All => (0..reference.height())
            .flat_map(|r| (0..reference.width()).map(move |c| Pixel::new(r, c)))
            .collect(),
        EvalPoints::Pixels(p) => {
            if let Some(bad) = p.iter().find(|p| !reference.contains(**p)) {
                return Err(Error::invalid(format!(
                    "evaluation point ({}, {}) outside {}x{} frame",
                    bad.row,
                    bad.col,
                    reference.width(),
                    reference.height()
                )));
            }
            p.clone()
        }
    };

    let (w, h) = (reference.width() as f64, reference.height() as f64);
    let in_view = |x: &Point2<f64>| x.x >= -0.5 && x.x < w - 0.5 && x.y >= -0.5 && x.y < h - 0.5;
    let lift = |disp: f64, px: &Point2<f64>| -> Option<(nalgebra::Point3<f64>, Point2<f64>)> {
        let depth = disparity_to_depth(disp, cam).ok()?;
        let xa = backproject(*px, depth, cam).ok()?;
        let xb = transform_point(pose, &xa);
        let img = project_pi(cam, &xb).ok()?;
        in_view(&img).then_some((xb, img))
    };

    let outcomes: Vec<Outcome> = pixels
        .par_iter()
        .map(|p| {
            let d_ref = reference.get(p.row, p.col);
            if !(is_valid(d_ref) && d_ref > 0.0) {
                return Outcome::InvalidReference;
            }
            let px = Point2::new(p.col as f64, p.row as f64);
            let d_est = estimate.get(p.row, p.col);
            let (Some((xr, ir)), Some((xe, ie))) = (lift(d_ref, &px), lift(d_est, &px)) else {
                return Outcome::Discarded;
            };
            Outcome::Kept(PointRecord {
                row: p.row,
                col: p.col,
                delta2d: error_2d(&ir, &ie),
                delta3d: error_3d(&xr, &xe),
                uncertainty: uncertainty.map(|u| u.get(p.row, p.col)),
                ref_depth: cam.disparity_scale() / d_ref,
            })
        })
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let (mut discarded, mut invalid) = (0, 0);
    for o in outcomes {
        match o {
            Outcome::Kept(r) => records.push(r),
            Outcome::Discarded => discarded += 1,
            Outcome::InvalidReference => invalid += 1,
        }
    }
    EvalReport::from_records(records, discarded, invalid, bins)
}

/// [`evaluate_frame`] for a [`Reconstruction`].
pub fn evaluate_reconstruction(
    recon: &Reconstruction,
    reference: &DepthMap,
    cam: &CameraModel,
    pose: &RigidTransform,
    points: &EvalPoints,
    bins: &BinConfig,
) -> Result<EvalReport> {
    evaluate_frame(
        &recon.dense,
        recon.uncertainty.as_ref(),
        reference,
        cam,
        pose,
        points,
        bins,
    )
}
