//! Dense disparity maps.

use crate::error::{Error, Result};

/// Marker stored in pixels that carry no valid disparity.
///
/// Any non-finite value read from disk is normalized to this marker, so
/// `!v.is_finite()` is the validity test used throughout the crate.
pub const SENTINEL: f64 = f64::NAN;

/// Returns `true` when `v` is a usable disparity.
#[inline]
pub fn is_valid(v: f64) -> bool {
    v.is_finite()
}

/// A pixel location, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Dense 2D disparity field stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DepthMap {
    /// Builds a map, normalizing every non-finite value to [`SENTINEL`].
    ///
    /// Finite negative values are rejected.
    pub fn new(width: usize, height: usize, mut values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "depth map dimensions must be positive, got {width}x{height}"
            )));
        }
        let s = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("depth map dimensions overflow"))?;
        if values.len() != s {
            return Err(Error::dims(format!("{s} values"), values.len()));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                *v = SENTINEL;
            } else if *v < 0.0 {
                return Err(Error::invalid(format!(
                    "negative disparity {v} at pixel index {i}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Builds a map that may hold negative values.
    ///
    /// Only linear reconstructions produce these; the dense MAP estimate is
    /// not constrained to be non-negative.
    pub(crate) fn from_unchecked(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        Self {
            width,
            height,
            values,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels, `width * height`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.index(row, col)]
    }

    pub fn contains(&self, px: Pixel) -> bool {
        px.row < self.height && px.col < self.width
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| is_valid(**v)).count()
    }

    pub fn is_fully_valid(&self) -> bool {
        self.values.iter().all(|v| is_valid(*v))
    }

    pub(crate) fn require_fully_valid(&self) -> Result<()> {
        if self.is_fully_valid() {
            Ok(())
        } else {
            Err(Error::SentinelPresent)
        }
    }

    pub fn same_shape(&self, other: &DepthMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn require_shape(&self, width: usize, height: usize) -> Result<()> {
        if self.width == width && self.height == height {
            Ok(())
        } else {
            Err(Error::dims(
                format!("{width}x{height}"),
                format!("{}x{}", self.width, self.height),
            ))
        }
    }

    /// Clamps negative values to zero, leaving sentinels alone.
    pub fn clamp_negative(mut self) -> Self {
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        self
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .copied()
            .filter(|v| is_valid(*v))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }
}
