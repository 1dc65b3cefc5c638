//! PCA model of a class of depth maps.
//!
//! The covariance of `n` training maps with `s` pixels each has rank below `n`,
//! and `n` is far smaller than `s`. The spectrum is therefore computed from the
//! `n x n` Gram matrix of the centered data and lifted back to pixel space;
//! the `s x s` covariance is never formed.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::depth::DepthMap;
use crate::error::{Error, Result};

/// Rows of pixels handed to one rayon task in the pixel-parallel loops.
const PIXEL_CHUNK: usize = 1024;

/// Tolerance for `|u_i . u_j - delta_ij|` when validating a basis.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;

/// A corpus of fully valid depth maps sharing one shape.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    width: usize,
    height: usize,
    maps: Vec<DepthMap>,
}

impl TrainingSet {
    pub fn new(maps: Vec<DepthMap>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::invalid(format!(
                "training set needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        let (width, height) = (maps[0].width(), maps[0].height());
        for (i, m) in maps.iter().enumerate() {
            if m.width() != width || m.height() != height {
                return Err(Error::dims(
                    format!("{width}x{height}"),
                    format!("{}x{} (training map {i})", m.width(), m.height()),
                ));
            }
            if !m.is_fully_valid() {
                return Err(Error::invalid(format!(
                    "training map {i} contains invalid pixels; preprocess first"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            maps,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of maps `n`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn maps(&self) -> &[DepthMap] {
        &self.maps
    }
}

/// Pixelwise arithmetic mean of the training maps.
pub fn compute_mean(training: &TrainingSet) -> DepthMap {
    let s = training.pixels();
    let n = training.len() as f64;
    let mut sum = vec![0.0; s];
    for map in training.maps() {
        for (acc, v) in sum.iter_mut().zip(map.values()) {
            *acc += v;
        }
    }
    for v in &mut sum {
        *v /= n;
    }
    DepthMap::from_unchecked(training.width(), training.height(), sum)
}

/// Settings for [`learn_basis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    /// Hard cap on the number of retained components.
    pub max_components: usize,
    /// Smallest cumulative variance fraction the retained components must reach.
    pub min_variance_fraction: f64,
    /// Gram eigenvalues at or below `eigenvalue_floor * gamma_0` are treated as zero.
    pub eigenvalue_floor: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            max_components: 500,
            min_variance_fraction: 0.90,
            eigenvalue_floor: 1e-12,
        }
    }
}

impl LearnConfig {
    fn validate(&self) -> Result<()> {
        if self.max_components == 0 {
            return Err(Error::invalid("max_components must be at least 1"));
        }
        if !(self.min_variance_fraction > 0.0 && self.min_variance_fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "min_variance_fraction must lie in (0, 1], got {}",
                self.min_variance_fraction
            )));
        }
        if !(self.eigenvalue_floor >= 0.0 && self.eigenvalue_floor < 1.0) {
            return Err(Error::invalid(format!(
                "eigenvalue_floor must lie in [0, 1), got {}",
                self.eigenvalue_floor
            )));
        }
        Ok(())
    }
}

/// Coordinates of a map in the principal coordinate system.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(pub Vec<f64>);

impl Coefficients {
    pub fn zeros(l: usize) -> Self {
        Self(vec![0.0; l])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A learned, truncated PCA model: mean image, orthonormal basis, eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    width: usize,
    height: usize,
    mean: Vec<f64>,
    /// `s x l`, column-major; column `i` is eigenvector `u_i`.
    basis: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    total_variance: f64,
}

impl PcaBasis {
    /// Assembles a basis from raw parts and checks every model invariant.
    pub fn from_parts(
        width: usize,
        height: usize,
        mean: Vec<f64>,
        basis: DMatrix<f64>,
        eigenvalues: Vec<f64>,
        total_variance: f64,
    ) -> Result<Self> {
        let b = Self {
            width,
            height,
            mean,
            basis,
            eigenvalues,
            total_variance,
        };
        b.check_invariants().map_err(Error::InvalidInput)?;
        Ok(b)
    }

    /// Returns a description of the first violated invariant, if any.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let s = self.width * self.height;
        let l = self.eigenvalues.len();
        if self.width == 0 || self.height == 0 {
            return Err("zero-sized frame".into());
        }
        if self.mean.len() != s {
            return Err(format!("mean has {} values, expected {s}", self.mean.len()));
        }
        if self.mean.iter().any(|v| !v.is_finite()) {
            return Err("mean contains non-finite values".into());
        }
        if self.basis.nrows() != s || self.basis.ncols() != l {
            return Err(format!(
                "basis is {}x{}, expected {s}x{l}",
                self.basis.nrows(),
                self.basis.ncols()
            ));
        }
        if l == 0 || l > s {
            return Err(format!("component count {l} outside 1..={s}"));
        }
        if self.eigenvalues.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("eigenvalues must be finite and strictly positive".into());
        }
        if self.eigenvalues.windows(2).any(|w| w[1] > w[0]) {
            return Err("eigenvalues are not in descending order".into());
        }
        if !self.total_variance.is_finite() || self.total_variance <= 0.0 {
            return Err("total variance must be finite and positive".into());
        }
        let sum: f64 = self.eigenvalues.iter().sum();
        if sum > self.total_variance * (1.0 + 1e-9) {
            return Err(format!(
                "eigenvalue sum {sum} exceeds total variance {}",
                self.total_variance
            ));
        }
        if self.basis.iter().any(|v| !v.is_finite()) {
            return Err("basis contains non-finite values".into());
        }
        let err = self.orthonormality_error();
        if err > ORTHONORMALITY_TOL {
            return Err(format!("basis columns are not orthonormal (max error {err:e})"));
        }
        Ok(())
    }

    /// `max |B^T B - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let l = self.l();
        let cols: Vec<&[f64]> = (0..l).map(|i| self.component(i)).collect();
        (0..l)
            .into_par_iter()
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let d = dot(cols[i], cols[j]);
                        let target = if i == j { 1.0 } else { 0.0 };
                        (d - target).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel count `s`.
    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    /// Number of retained components `l`.
    pub fn l(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn mean_map(&self) -> DepthMap {
        DepthMap::from_unchecked(self.width, self.height, self.mean.clone())
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Eigenvector `u_i` as a contiguous pixel array.
    pub fn component(&self, i: usize) -> &[f64] {
        let s = self.pixels();
        &self.basis.as_slice()[i * s..(i + 1) * s]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Fraction of total variance explained by the first `k` components.
    pub fn cumulative_variance_fraction(&self, k: usize) -> Result<f64> {
        cumulative_variance_fraction(&self.eigenvalues, self.total_variance, k)
    }

    /// Keeps the first `l_new` components; total variance is unchanged.
    pub fn truncate(&self, l_new: usize) -> Result<PcaBasis> {
        if l_new == 0 || l_new > self.l() {
            return Err(Error::invalid(format!(
                "truncation size {l_new} outside 1..={}",
                self.l()
            )));
        }
        Ok(PcaBasis {
            width: self.width,
            height: self.height,
            mean: self.mean.clone(),
            basis: self.basis.columns(0, l_new).into_owned(),
            eigenvalues: self.eigenvalues[..l_new].to_vec(),
            total_variance: self.total_variance,
        })
    }

    /// `y = B^T (d - m)`.
    pub fn project(&self, dense: &DepthMap) -> Result<Coefficients> {
        dense.require_shape(self.width, self.height)?;
        dense.require_fully_valid()?;
        let centered: Vec<f64> = dense
            .values()
            .iter()
            .zip(&self.mean)
            .map(|(d, m)| d - m)
            .collect();
        let y = (0..self.l())
            .into_par_iter()
            .map(|i| dot(self.component(i), &centered))
            .collect();
        Ok(Coefficients(y))
    }

    /// `d = B y + m`.
    pub fn reconstruct(&self, coeffs: &Coefficients) -> Result<DepthMap> {
        if coeffs.len() != self.l() {
            return Err(Error::dims(
                format!("{} coefficients", self.l()),
                coeffs.len(),
            ));
        }
        let values = self.expand(|i| coeffs.0[i], |j, acc| self.mean[j] + acc);
        Ok(DepthMap::from_unchecked(self.width, self.height, values))
    }

    /// Per-pixel `finish(j, sum_i weight(i) * term(B_ji))`, accumulated in
    /// component order so the result does not depend on the thread count.
    pub(crate) fn expand_with<W, T, F>(&self, weight: W, term: T, finish: F) -> Vec<f64>
    where
        W: Fn(usize) -> f64 + Sync,
        T: Fn(f64) -> f64 + Sync,
        F: Fn(usize, f64) -> f64 + Sync,
    {
        let s = self.pixels();
        let weights: Vec<f64> = (0..self.l()).map(&weight).collect();
        let mut out = vec![0.0; s];
        out.par_chunks_mut(PIXEL_CHUNK)
            .enumerate()
            .for_each(|(chunk, dst)| {
                let start = chunk * PIXEL_CHUNK;
                for (i, w) in weights.iter().enumerate() {
                    let col = &self.component(i)[start..start + dst.len()];
                    for (o, b) in dst.iter_mut().zip(col) {
                        *o += w * term(*b);
                    }
                }
                for (k, o) in dst.iter_mut().enumerate() {
                    *o = finish(start + k, *o);
                }
            });
        out
    }

    fn expand<W, F>(&self, weight: W, finish: F) -> Vec<f64>
    where
        W: Fn(usize) -> f64 + Sync,
        F: Fn(usize, f64) -> f64 + Sync,
    {
        self.expand_with(weight, |b| b, finish)
    }
}

/// `(sum_{i<k} lambda_i) / total_variance`.
pub fn cumulative_variance_fraction(eigenvalues: &[f64], total_variance: f64, k: usize) -> Result<f64> {
    if k == 0 || k > eigenvalues.len() {
        return Err(Error::invalid(format!(
            "component count {k} outside 1..={}",
            eigenvalues.len()
        )));
    }
    if !(total_variance > 0.0) {
        return Err(Error::invalid("total variance must be positive"));
    }
    Ok(eigenvalues[..k].iter().sum::<f64>() / total_variance)
}

/// Learns the mean, eigenvalues and truncated orthonormal basis of a corpus.
pub fn learn_basis(training: &TrainingSet, config: &LearnConfig) -> Result<PcaBasis> {
    config.validate()?;
    let n = training.len();
    let s = training.pixels();
    let mean = compute_mean(training).into_values();

    let centered: Vec<Vec<f64>> = training
        .maps()
        .par_iter()
        .map(|m| m.values().iter().zip(&mean).map(|(d, mu)| d - mu).collect())
        .collect();

    let gram = gram_matrix(&centered);
    let raw_energy: f64 = training
        .maps()
        .iter()
        .map(|m| m.values().iter().map(|v| v * v).sum::<f64>())
        .sum();
    let trace: f64 = gram.diagonal().iter().sum();
    // Centering round-off alone leaves roughly eps^2 of the raw energy.
    if !(trace > 1e-24 * raw_energy) {
        return Err(Error::DegenerateTrainingSet);
    }

    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let gamma0 = eig.eigenvalues[order[0]];
    if !(gamma0 > 0.0) {
        return Err(Error::DegenerateTrainingSet);
    }
    let kept: Vec<usize> = order
        .into_iter()
        .take_while(|&i| eig.eigenvalues[i] > config.eigenvalue_floor * gamma0)
        .collect();
    if kept.is_empty() {
        return Err(Error::DegenerateTrainingSet);
    }

    let dof = (n - 1) as f64;
    let all_lambdas: Vec<f64> = kept.iter().map(|&i| eig.eigenvalues[i] / dof).collect();
    let total_variance: f64 = all_lambdas.iter().sum();

    let mut l = all_lambdas.len();
    for k in 1..=all_lambdas.len() {
        if cumulative_variance_fraction(&all_lambdas, total_variance, k)? >= config.min_variance_fraction {
            l = k;
            break;
        }
    }
    let l = l.min(config.max_components).min(s);

    // u_i = D v_i / sqrt(gamma_i), evaluated per pixel in fixed order.
    let mut basis = DMatrix::<f64>::zeros(s, l);
    basis
        .as_mut_slice()
        .par_chunks_mut(s)
        .enumerate()
        .for_each(|(c, col)| {
            let gi = kept[c];
            let v = eig.eigenvectors.column(gi);
            let scale = 1.0 / eig.eigenvalues[gi].sqrt();
            for (k, d) in centered.iter().enumerate() {
                let w = v[k];
                for (o, x) in col.iter_mut().zip(d) {
                    *o += w * x;
                }
            }
            for o in col.iter_mut() {
                *o *= scale;
            }
        });

    reorthonormalize(&mut basis, s);
    canonicalize_signs(&mut basis, s);

    let basis = PcaBasis {
        width: training.width(),
        height: training.height(),
        mean,
        basis,
        eigenvalues: all_lambdas[..l].to_vec(),
        total_variance,
    };
    if let Err(reason) = basis.check_invariants() {
        return Err(Error::Numerical(format!("learned basis failed validation: {reason}")));
    }
    Ok(basis)
}

/// `G = D^T D` with `D` given column by column; each entry is an independent
/// sequential dot product.
fn gram_matrix(columns: &[Vec<f64>]) -> DMatrix<f64> {
    let n = columns.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| dot(&columns[i], &columns[j]))
        .collect();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    g
}

/// Two passes of modified Gram-Schmidt over the columns in order.
///
/// Lifting Gram eigenvectors to pixel space loses orthogonality in
/// proportion to `eps * gamma_0 / gamma_i`; this restores it for
/// small-eigenvalue directions and is a no-op to round-off elsewhere.
fn reorthonormalize(basis: &mut DMatrix<f64>, s: usize) {
    let l = basis.ncols();
    let data = basis.as_mut_slice();
    for _ in 0..2 {
        for i in 0..l {
            let (done, rest) = data.split_at_mut(i * s);
            let col = &mut rest[..s];
            for j in 0..i {
                let prev = &done[j * s..(j + 1) * s];
                let proj = dot(prev, col);
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
            let norm = dot(col, col).sqrt();
            for c in col.iter_mut() {
                *c /= norm;
            }
        }
    }
}

/// Flips each column so its largest-magnitude entry (lowest index on ties)
/// is positive.
fn canonicalize_signs(basis: &mut DMatrix<f64>, s: usize) {
    for col in basis.as_mut_slice().chunks_mut(s) {
        let mut best = 0;
        for (j, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = j;
            }
        }
        if col[best] < 0.0 {
            for v in col.iter_mut() {
                *v = -*v;
            }
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn map(w: usize, h: usize, v: &[f64]) -> DepthMap {
        DepthMap::new(w, h, v.to_vec()).unwrap()
    }

    #[test]
    fn mean_of_two_constant_maps() {
        let t = TrainingSet::new(vec![map(2, 2, &[2.0; 4]), map(2, 2, &[4.0; 4])]).unwrap();
        assert_eq!(compute_mean(&t).values(), &[3.0; 4]);
    }

    #[test]
    fn mean_of_identical_maps_is_the_map() {
        let d = [0.5, 1.5, 7.25];
        let t = TrainingSet::new(vec![map(3, 1, &d); 4]).unwrap();
        assert_eq!(compute_mean(&t).values(), &d);
    }

    #[test]
    fn mean_of_three_two_pixel_maps() {
        let t = TrainingSet::new(vec![
            map(2, 1, &[1.0, 2.0]),
            map(2, 1, &[3.0, 4.0]),
            map(2, 1, &[5.0, 9.0]),
        ])
        .unwrap();
        assert_eq!(compute_mean(&t).values(), &[3.0, 5.0]);
    }

    #[test]
    fn training_set_rejects_singletons_mismatch_and_sentinels() {
        assert!(TrainingSet::new(vec![map(2, 1, &[1.0, 2.0])]).is_err());
        assert!(TrainingSet::new(vec![map(2, 1, &[1.0, 2.0]), map(1, 2, &[1.0, 2.0])]).is_err());
        let holey = DepthMap::new(2, 1, vec![1.0, f64::NAN]).unwrap();
        assert!(TrainingSet::new(vec![map(2, 1, &[1.0, 2.0]), holey]).is_err());
    }

    #[test]
    fn diagonal_line_corpus_has_one_component() {
        let t = TrainingSet::new(vec![
            map(2, 1, &[0.0, 0.0]),
            map(2, 1, &[1.0, 1.0]),
            map(2, 1, &[2.0, 2.0]),
        ])
        .unwrap();
        let cfg = LearnConfig {
            min_variance_fraction: 1.0,
            ..Default::default()
        };
        let b = learn_basis(&t, &cfg).unwrap();
        assert_eq!(b.mean(), &[1.0, 1.0]);
        assert_eq!(b.l(), 1);
        assert_relative_eq!(b.eigenvalues()[0], 2.0, epsilon = 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(b.component(0)[0], h, epsilon = 1e-12);
        assert_relative_eq!(b.component(0)[1], h, epsilon = 1e-12);
    }

    #[test]
    fn identical_maps_are_degenerate() {
        let t = TrainingSet::new(vec![map(3, 1, &[0.1, 0.2, 0.3]); 3]).unwrap();
        assert!(matches!(
            learn_basis(&t, &LearnConfig::default()),
            Err(Error::DegenerateTrainingSet)
        ));
    }

    #[test]
    fn cumulative_fraction_arithmetic() {
        assert_eq!(cumulative_variance_fraction(&[3.0, 1.0], 4.0, 1).unwrap(), 0.75);
        assert_eq!(cumulative_variance_fraction(&[3.0, 1.0], 4.0, 2).unwrap(), 1.0);
        assert!(cumulative_variance_fraction(&[3.0, 1.0], 4.0, 0).is_err());
        assert!(cumulative_variance_fraction(&[3.0, 1.0], 4.0, 3).is_err());
    }

    fn small_basis() -> PcaBasis {
        let maps = (0..6)
            .map(|i| {
                let v: Vec<f64> = (0..8)
                    .map(|j| ((i * 7 + j * 3) % 5) as f64 + (i as f64) * 0.1 * j as f64)
                    .collect();
                map(4, 2, &v)
            })
            .collect();
        let cfg = LearnConfig {
            min_variance_fraction: 1.0,
            ..Default::default()
        };
        learn_basis(&TrainingSet::new(maps).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn truncation_is_a_prefix() {
        let b = small_basis();
        assert!(b.l() >= 2);
        assert_eq!(b.truncate(b.l()).unwrap(), b);
        let one = b.truncate(1).unwrap();
        assert_eq!(one.l(), 1);
        assert_eq!(one.component(0), b.component(0));
        assert_eq!(one.eigenvalues(), &b.eigenvalues()[..1]);
        assert_eq!(one.total_variance(), b.total_variance());
        for k in 1..=b.l() {
            assert_eq!(
                b.truncate(k).unwrap().cumulative_variance_fraction(k).unwrap(),
                b.cumulative_variance_fraction(k).unwrap()
            );
        }
        assert!(b.truncate(0).is_err());
        assert!(b.truncate(b.l() + 1).is_err());
    }

    #[test]
    fn project_mean_and_components() {
        let b = small_basis();
        let y = b.project(&b.mean_map()).unwrap();
        assert!(y.as_slice().iter().all(|v| *v == 0.0));

        let shifted: Vec<f64> = b
            .mean()
            .iter()
            .zip(b.component(0))
            .map(|(m, u)| m + u)
            .collect();
        let y = b
            .project(&DepthMap::from_unchecked(4, 2, shifted))
            .unwrap();
        assert_relative_eq!(y.0[0], 1.0, epsilon = 1e-12);
        for v in &y.0[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_zero_is_mean_exactly() {
        let b = small_basis();
        let d = b.reconstruct(&Coefficients::zeros(b.l())).unwrap();
        assert_eq!(d.values(), b.mean());
        let mut e0 = Coefficients::zeros(b.l());
        e0.0[0] = 1.0;
        let d = b.reconstruct(&e0).unwrap();
        for j in 0..b.pixels() {
            assert_relative_eq!(d.values()[j], b.mean()[j] + b.component(0)[j], epsilon = 1e-14);
        }
        assert!(b.reconstruct(&Coefficients::zeros(b.l() + 1)).is_err());
    }

    #[test]
    fn project_rejects_wrong_shape_and_sentinels() {
        let b = small_basis();
        assert!(b.project(&DepthMap::filled(2, 4, 1.0).unwrap()).is_err());
        let mut v = vec![1.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(
            b.project(&DepthMap::new(4, 2, v).unwrap()),
            Err(Error::SentinelPresent)
        ));
    }

    #[test]
    fn learned_basis_is_canonical_and_orthonormal() {
        let b = small_basis();
        assert!(b.orthonormality_error() < 1e-12);
        for i in 0..b.l() {
            let col = b.component(i);
            let mut best = 0;
            for j in 0..col.len() {
                if col[j].abs() > col[best].abs() {
                    best = j;
                }
            }
            assert!(col[best] > 0.0);
        }
        assert!(b.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn config_validation() {
        let t = TrainingSet::new(vec![map(2, 1, &[0.0, 1.0]), map(2, 1, &[1.0, 0.0])]).unwrap();
        for cfg in [
            LearnConfig { max_components: 0, ..Default::default() },
            LearnConfig { min_variance_fraction: 0.0, ..Default::default() },
            LearnConfig { min_variance_fraction: 1.5, ..Default::default() },
            LearnConfig { eigenvalue_floor: -1.0, ..Default::default() },
        ] {
            assert!(matches!(learn_basis(&t, &cfg), Err(Error::InvalidInput(_))));
        }
    }
}
