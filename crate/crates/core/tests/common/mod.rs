//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

use nalgebra::DMatrix;
use pcadepth::{DepthMap, PcaBasis, SparseEntry, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues in
/// descending order and the matching unit eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Sample covariance `(1/(n-1)) sum (d - m)(d - m)^T`, computed directly.
pub fn direct_covariance(t: &TrainingSet) -> DMatrix<f64> {
    let s = t.pixels();
    let n = t.len();
    let mean: Vec<f64> = (0..s)
        .map(|j| t.maps().iter().map(|m| m.values()[j]).sum::<f64>() / n as f64)
        .collect();
    let mut c = DMatrix::<f64>::zeros(s, s);
    for m in t.maps() {
        let d: Vec<f64> = m.values().iter().zip(&mean).map(|(v, mu)| v - mu).collect();
        for i in 0..s {
            for j in 0..s {
                c[(i, j)] += d[i] * d[j];
            }
        }
    }
    c / (n as f64 - 1.0)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn dense_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        m.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        let d = m[(col, col)];
        for k in 0..n {
            m[(col, k)] /= d;
            inv[(col, k)] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[(r, col)];
                for k in 0..n {
                    m[(r, k)] -= f * m[(col, k)];
                    inv[(r, k)] -= f * inv[(col, k)];
                }
            }
        }
    }
    inv
}

/// Random basis with orthonormal columns (modified Gram-Schmidt on Gaussian
/// vectors) and strictly decreasing eigenvalues.
pub fn random_basis(r: &mut impl Rng, width: usize, height: usize, l: usize) -> PcaBasis {
    let s = width * height;
    assert!(l <= s);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(l);
    while cols.len() < l {
        let mut v: Vec<f64> = (0..s).map(|_| r.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut eig: Vec<f64> = (0..l).map(|_| r.random_range(0.1..100.0)).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let total = eig.iter().sum::<f64>() * r.random_range(1.0..2.0);
    let mean = (0..s).map(|_| r.random_range(0.0..30.0)).collect();
    let basis = DMatrix::from_fn(s, l, |j, i| cols[i][j]);
    PcaBasis::from_parts(width, height, mean, basis, eig, total).expect("valid random basis")
}

/// `k` distinct pixel indices of a frame with `s` pixels.
pub fn distinct_pixels(r: &mut impl Rng, s: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(r, s, k).into_vec()
}

/// Exhaustive nearest-source oracle. Ties go to the lowest entry index.
pub fn nn_oracle(width: usize, height: usize, entries: &[SparseEntry]) -> Vec<f64> {
    let mut out = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let mut best: Option<(i64, f64)> = None;
            for e in entries {
                let d2 = (e.row as i64 - r as i64).pow(2) + (e.col as i64 - c as i64).pow(2);
                if best.is_none_or(|(b, _)| d2 < b) {
                    best = Some((d2, e.disparity));
                }
            }
            out.push(best.expect("at least one entry").1);
        }
    }
    out
}

/// Box blur by direct 2D summation with clamped borders.
pub fn naive_blur(map: &DepthMap, k: usize) -> Vec<f64> {
    let (w, h) = (map.width() as i64, map.height() as i64);
    let rad = (k / 2) as i64;
    let mut out = Vec::with_capacity(map.len());
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for dr in -rad..=rad {
                for dc in -rad..=rad {
                    let rr = (r + dr).clamp(0, h - 1) as usize;
                    let cc = (c + dc).clamp(0, w - 1) as usize;
                    acc += map.get(rr, cc);
                }
            }
            out.push(acc / (k * k) as f64);
        }
    }
    out
}

/// Order-sensitive digest of exact f64 bit patterns.
pub fn digest(values: impl IntoIterator<Item = f64>) -> u64 {
    use std::hash::{DefaultHasher, Hasher};
    let mut h = DefaultHasher::new();
    for v in values {
        h.write_u64(v.to_bits());
    }
    h.finish()
}
