//! Dense reconstruction from sparse disparity measurements.
//!
//! The coefficients of the truncated basis are estimated by maximizing the
//! posterior under a zero-mean Gaussian prior with the PCA eigenvalues as
//! variances and i.i.d. Gaussian measurement noise. The resulting normal
//! matrix `sigma_z^2 Lambda^-1 + B~^T B~` is positive definite for any number
//! of measurements, so the estimate is unique even when there are fewer
//! measurements than components.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::depth::{DepthMap, Pixel};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::nearest::nearest_fill;
use crate::pca::{Coefficients, PcaBasis};

/// One measured disparity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub disparity: f64,
}

impl SparseEntry {
    pub fn new(row: usize, col: usize, disparity: f64) -> Self {
        Self { row, col, disparity }
    }

    pub fn pixel(&self) -> Pixel {
        Pixel::new(self.row, self.col)
    }
}

/// Validated sparse measurements within a `width x height` frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMeasurement {
    width: usize,
    height: usize,
    entries: Vec<SparseEntry>,
}

impl SparseMeasurement {
    pub fn new(width: usize, height: usize, entries: Vec<SparseEntry>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("measurement frame must be non-empty"));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for (k, e) in entries.iter().enumerate() {
            if e.row >= height || e.col >= width {
                return Err(Error::invalid(format!(
                    "measurement {k} at ({}, {}) outside {width}x{height} frame",
                    e.row, e.col
                )));
            }
            if !(e.disparity.is_finite() && e.disparity >= 0.0) {
                return Err(Error::invalid(format!(
                    "measurement {k} at ({}, {}) has invalid disparity {}",
                    e.row, e.col, e.disparity
                )));
            }
            if !seen.insert((e.row, e.col)) {
                return Err(Error::invalid(format!(
                    "duplicate measurement at ({}, {})",
                    e.row, e.col
                )));
            }
        }
        Ok(Self {
            width,
            height,
            entries,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, Vec::new())
    }

    /// Reads the disparities of `pixels` out of `map`, skipping invalid ones.
    pub fn sample(map: &DepthMap, pixels: &[Pixel]) -> Result<Self> {
        let entries = pixels
            .iter()
            .filter(|p| map.contains(**p) && map.get(p.row, p.col).is_finite())
            .map(|p| SparseEntry::new(p.row, p.col, map.get(p.row, p.col)))
            .collect();
        Self::new(map.width(), map.height(), entries)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn entries(&self) -> &[SparseEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A copy with one more entry appended.
    pub fn with_entry(&self, entry: SparseEntry) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.push(entry);
        Self::new(self.width, self.height, entries)
    }

    fn pixel_index(&self, e: &SparseEntry) -> usize {
        e.row * self.width + e.col
    }
}

/// How the coefficient covariance is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceMode {
    /// `(sigma_z^2 Lambda^-1 + B~^T B~)^-1`, the inverse normal matrix.
    #[default]
    Unscaled,
    /// `sigma_z^2 (sigma_z^2 Lambda^-1 + B~^T B~)^-1`, the linear-Gaussian
    /// posterior covariance.
    SigmaScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapConfig {
    /// Measurement noise standard deviation in px.
    pub sigma_z: f64,
    pub covariance_mode: CovarianceMode,
    pub compute_uncertainty: bool,
    /// Clamp negative reconstructed disparities to zero.
    pub clamp_negative: bool,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            sigma_z: 2.0,
            covariance_mode: CovarianceMode::Unscaled,
            compute_uncertainty: false,
            clamp_negative: false,
        }
    }
}

impl MapConfig {
    fn validate(&self) -> Result<()> {
        if !(self.sigma_z.is_finite() && self.sigma_z > 0.0) {
            return Err(Error::invalid(format!(
                "sigma_z must be positive and finite, got {}",
                self.sigma_z
            )));
        }
        Ok(())
    }
}

/// Basis rows, mean and centered measurements at the measured pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSystem {
    /// `m x l`, row `k` is the basis row at measurement `k`.
    pub rows: DMatrix<f64>,
    pub mean: Vec<f64>,
    /// `z~_k = d~_k - m~_k`.
    pub centered: Vec<f64>,
}

fn check_frame(basis: &PcaBasis, sparse: &SparseMeasurement) -> Result<()> {
    if basis.width() != sparse.width() || basis.height() != sparse.height() {
        return Err(Error::dims(
            format!("{}x{}", basis.width(), basis.height()),
            format!("{}x{}", sparse.width(), sparse.height()),
        ));
    }
    Ok(())
}

pub fn restrict_basis(basis: &PcaBasis, sparse: &SparseMeasurement) -> Result<RestrictedSystem> {
    check_frame(basis, sparse)?;
    let (m, l) = (sparse.len(), basis.l());
    let mut rows = DMatrix::<f64>::zeros(m, l);
    let mut mean = Vec::with_capacity(m);
    let mut centered = Vec::with_capacity(m);
    for (k, e) in sparse.entries().iter().enumerate() {
        let j = sparse.pixel_index(e);
        for i in 0..l {
            rows[(k, i)] = basis.component(i)[j];
        }
        mean.push(basis.mean()[j]);
        centered.push(e.disparity - basis.mean()[j]);
    }
    Ok(RestrictedSystem {
        rows,
        mean,
        centered,
    })
}

/// MAP coefficients and the diagonal of their covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate {
    pub coeffs: Coefficients,
    /// `kappa_i^2`, disparity^2 units.
    pub coeff_variances: Vec<f64>,
}

/// Normal matrix `sigma_z^2 Lambda^-1 + B~^T B~` and right-hand side `B~^T z~`.
pub fn normal_equations(
    basis: &PcaBasis,
    system: &RestrictedSystem,
    sigma_z: f64,
) -> (DMatrix<f64>, Vec<f64>) {
    let l = basis.l();
    let var = sigma_z * sigma_z;
    let rows = &system.rows;
    let mut normal = DMatrix::<f64>::zeros(l, l);
    for i in 0..l {
        for j in 0..=i {
            let mut v = 0.0;
            for k in 0..rows.nrows() {
                v += rows[(k, i)] * rows[(k, j)];
            }
            normal[(i, j)] = v;
            normal[(j, i)] = v;
        }
        normal[(i, i)] += var / basis.eigenvalues()[i];
    }
    let rhs = (0..l)
        .map(|i| {
            (0..rows.nrows())
                .map(|k| rows[(k, i)] * system.centered[k])
                .sum()
        })
        .collect();
    (normal, rhs)
}

/// Negative log posterior up to an additive constant:
/// `|z~ - B~ y|^2 / sigma_z^2 + y^T Lambda^-1 y`.
pub fn map_objective(basis: &PcaBasis, system: &RestrictedSystem, sigma_z: f64, y: &[f64]) -> f64 {
    let var = sigma_z * sigma_z;
    let rows = &system.rows;
    let misfit: f64 = (0..rows.nrows())
        .map(|k| {
            let pred: f64 = (0..basis.l()).map(|i| rows[(k, i)] * y[i]).sum();
            let r = system.centered[k] - pred;
            r * r
        })
        .sum();
    let prior: f64 = y
        .iter()
        .zip(basis.eigenvalues())
        .map(|(yi, li)| yi * yi / li)
        .sum();
    misfit / var + prior
}

pub fn map_estimate(
    basis: &PcaBasis,
    sparse: &SparseMeasurement,
    config: &MapConfig,
) -> Result<MapEstimate> {
    config.validate()?;
    let system = restrict_basis(basis, sparse)?;
    let (normal, rhs) = normal_equations(basis, &system, config.sigma_z);
    let chol = Cholesky::factor(&normal)?;
    let coeffs = Coefficients(chol.solve(&rhs));
    let mut coeff_variances = chol.inverse_diagonal();
    if config.covariance_mode == CovarianceMode::SigmaScaled {
        let var = config.sigma_z * config.sigma_z;
        coeff_variances.iter_mut().for_each(|k| *k *= var);
    }
    if coeffs.0.iter().chain(&coeff_variances).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("MAP solve produced non-finite values".into()));
    }
    Ok(MapEstimate {
        coeffs,
        coeff_variances,
    })
}

/// `xi_j = sum_i kappa_i^2 B_ji^2`, the diagonal of
/// `sum_i kappa_i^2 u_i u_i^T`, in `O(s l)`.
pub fn uncertainty_image(basis: &PcaBasis, coeff_variances: &[f64]) -> Result<Vec<f64>> {
    if coeff_variances.len() != basis.l() {
        return Err(Error::dims(
            format!("{} variances", basis.l()),
            coeff_variances.len(),
        ));
    }
    if coeff_variances.iter().any(|k| !(*k >= 0.0)) {
        return Err(Error::invalid("coefficient variances must be non-negative"));
    }
    Ok(basis.expand_with(|i| coeff_variances[i], |b| b * b, |_, acc| acc))
}

/// Output of [`densify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub dense: DepthMap,
    pub coeffs: Coefficients,
    pub coeff_variances: Vec<f64>,
    /// Present only when requested in [`MapConfig::compute_uncertainty`].
    pub uncertainty: Option<DepthMap>,
}

/// MAP estimate followed by `d^ = B y^ + m`.
pub fn densify(
    basis: &PcaBasis,
    sparse: &SparseMeasurement,
    config: &MapConfig,
) -> Result<Reconstruction> {
    let est = map_estimate(basis, sparse, config)?;
    let mut dense = basis.reconstruct(&est.coeffs)?;
    if config.clamp_negative {
        dense = dense.clamp_negative();
    }
    let uncertainty = if config.compute_uncertainty {
        let xi = uncertainty_image(basis, &est.coeff_variances)?;
        Some(DepthMap::from_unchecked(basis.width(), basis.height(), xi))
    } else {
        None
    };
    Ok(Reconstruction {
        dense,
        coeffs: est.coeffs,
        coeff_variances: est.coeff_variances,
        uncertainty,
    })
}

/// Nearest-measurement interpolation, ties resolved by entry order.
pub fn nearest_neighbor_densify(sparse: &SparseMeasurement) -> Result<DepthMap> {
    if sparse.is_empty() {
        return Err(Error::invalid(
            "nearest-neighbour interpolation needs at least one measurement",
        ));
    }
    let sources: Vec<(usize, f64)> = sparse
        .entries()
        .iter()
        .map(|e| (sparse.pixel_index(e), e.disparity))
        .collect();
    let values = nearest_fill(sparse.width(), sparse.height(), &sources);
    DepthMap::new(sparse.width(), sparse.height(), values)
}
