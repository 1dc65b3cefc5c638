//! Fixed-size examples checked against independent oracles.

#![allow(clippy::needless_range_loop)]

mod common;

use nalgebra::{DMatrix, DVector, Point3, Rotation3, Vector3};
use pcadepth::densify::restrict_basis;
use pcadepth::synth::draw_boxes;
use pcadepth::{
    backproject, box_blur, densify, depth_to_disparity, disparity_to_depth, evaluate_frame,
    fill_invalid_nearest, generate_scene, generate_training_set, io, learn_basis, map_estimate,
    map_objective, nearest_neighbor_densify, project_pi, uncertainty_image,
    BinConfig, CameraModel, Coefficients, DepthMap, Error, EvalPoints, Jitter, LearnConfig,
    MapConfig, RigidTransform, SceneParams, SparseEntry, SparseMeasurement, TrainingSet,
    UncertaintyBins,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use common::*;

fn random_training(r: &mut impl Rng, w: usize, h: usize, n: usize) -> TrainingSet {
    TrainingSet::new(
        (0..n)
            .map(|_| DepthMap::new(w, h, (0..w * h).map(|_| r.random_range(0.0..40.0)).collect()).unwrap())
            .collect(),
    )
    .unwrap()
}

#[test]
fn gram_route_matches_direct_covariance_n12_s48() {
    let mut r = rng(12);
    let t = random_training(&mut r, 8, 6, 12);
    let b = learn_basis(&t, &LearnConfig { min_variance_fraction: 1.0, ..Default::default() }).unwrap();
    assert_eq!(b.l(), 11);
    let (vals, vecs) = jacobi_eigen(&direct_covariance(&t));
    for i in 0..b.l() {
        assert!((b.eigenvalues()[i] - vals[i]).abs() <= 1e-9 * vals[i]);
        let cos: f64 = b.component(i).iter().zip(vecs.column(i).iter()).map(|(a, c)| a * c).sum();
        assert!(cos.abs() >= 1.0 - 1e-9, "component {i}: |cos| = {}", cos.abs());
    }
    // Everything beyond n - 1 directions carries no variance.
    assert!(vals[11..].iter().all(|v| v.abs() <= 1e-9 * vals[0]));
    let total: f64 = vals.iter().sum();
    assert!((b.total_variance() - total).abs() <= 1e-9 * total);
}

#[test]
fn truncated_fraction_matches_untruncated() {
    let mut r = rng(13);
    let t = random_training(&mut r, 5, 5, 10);
    let b = learn_basis(&t, &LearnConfig { min_variance_fraction: 1.0, ..Default::default() }).unwrap();
    for k in 1..=b.l() {
        let tr = b.truncate(k).unwrap();
        assert_eq!(tr.cumulative_variance_fraction(k).unwrap(), b.cumulative_variance_fraction(k).unwrap());
    }
}

#[test]
fn projection_recovers_planted_coefficients() {
    let mut r = rng(14);
    let b = random_basis(&mut r, 9, 7, 6);
    let y: Vec<f64> = (0..6).map(|_| r.random_range(-10.0..10.0)).collect();
    let d = b.reconstruct(&Coefficients(y.clone())).unwrap();
    let back = b.project(&d).unwrap();
    for (a, e) in back.0.iter().zip(&y) {
        assert!((a - e).abs() <= 1e-10);
    }
    let again = b.reconstruct(&back).unwrap();
    for (a, e) in again.values().iter().zip(d.values()) {
        assert!((a - e).abs() <= 1e-8);
    }
}

#[test]
fn fill_5x5_two_sources_matches_brute_force() {
    let mut vals = vec![f64::NAN; 25];
    vals[6] = 3.0; // (1, 1)
    vals[18] = 8.0; // (3, 3)
    let m = DepthMap::new(5, 5, vals).unwrap();
    let f = fill_invalid_nearest(&m).unwrap();
    // Ties go to the lower row-major source index, i.e. (1, 1).
    let want = nn_oracle(5, 5, &[SparseEntry::new(1, 1, 3.0), SparseEntry::new(3, 3, 8.0)]);
    assert_eq!(f.values(), want.as_slice());
}

#[test]
fn blur_9x7_kernel5_matches_double_loop() {
    let mut r = rng(15);
    let m = DepthMap::new(9, 7, (0..63).map(|_| r.random_range(0.0..90.0)).collect()).unwrap();
    let b = box_blur(&m, 5).unwrap();
    for (a, e) in b.values().iter().zip(naive_blur(&m, 5)) {
        assert!((a - e).abs() <= 1e-12);
    }
}

#[test]
fn restriction_4x4_matches_direct_indexing() {
    let mut r = rng(16);
    let b = random_basis(&mut r, 4, 4, 2);
    let entries = vec![SparseEntry::new(0, 3, 1.0), SparseEntry::new(2, 1, 4.0), SparseEntry::new(3, 0, 9.0)];
    let sparse = SparseMeasurement::new(4, 4, entries.clone()).unwrap();
    let sys = restrict_basis(&b, &sparse).unwrap();
    for (k, e) in entries.iter().enumerate() {
        let j = e.row * 4 + e.col;
        for i in 0..2 {
            assert_eq!(sys.rows[(k, i)], b.basis()[(j, i)]);
        }
        assert_eq!(sys.mean[k], b.mean()[j]);
        assert_eq!(sys.centered[k], e.disparity - b.mean()[j]);
    }
}

#[test]
fn map_l3_m5_matches_dense_inverse_and_minimizes_objective() {
    let mut r = rng(17);
    let b = random_basis(&mut r, 6, 4, 3);
    let entries = distinct_pixels(&mut r, 24, 5)
        .into_iter()
        .map(|j| SparseEntry::new(j / 6, j % 6, r.random_range(0.0..30.0)))
        .collect();
    let sparse = SparseMeasurement::new(6, 4, entries).unwrap();
    let sigma = 2.0;
    let est = map_estimate(&b, &sparse, &MapConfig::default()).unwrap();
    let sys = restrict_basis(&b, &sparse).unwrap();
    let bt = &sys.rows;
    let prior = DMatrix::from_diagonal(&DVector::from_iterator(3, b.eigenvalues().iter().map(|v| sigma * sigma / v)));
    let m = bt.transpose() * bt + prior;
    let minv = dense_inverse(&m);
    let y = &minv * (bt.transpose() * DVector::from_vec(sys.centered.clone()));
    for i in 0..3 {
        assert!((est.coeffs.0[i] - y[i]).abs() <= 1e-10);
        assert!((est.coeff_variances[i] - minv[(i, i)]).abs() <= 1e-12);
    }
    let j0 = map_objective(&b, &sys, sigma, &est.coeffs.0);
    for _ in 0..100 {
        let d: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let y2: Vec<f64> = est.coeffs.0.iter().zip(&d).map(|(a, x)| a + 1e-3 * x / n).collect();
        assert!(map_objective(&b, &sys, sigma, &y2) >= j0);
    }
}

#[test]
fn uncertainty_s20_l4_matches_explicit_product() {
    let mut r = rng(18);
    let b = random_basis(&mut r, 5, 4, 4);
    let kappa: Vec<f64> = (0..4).map(|_| r.random_range(0.0..5.0)).collect();
    let xi = uncertainty_image(&b, &kappa).unwrap();
    let full = b.basis() * DMatrix::from_diagonal(&DVector::from_vec(kappa)) * b.basis().transpose();
    for (j, x) in xi.iter().enumerate() {
        assert!((x - full[(j, j)]).abs() <= 1e-12);
    }
}

#[test]
fn nearest_6x6_three_measurements() {
    let entries = vec![SparseEntry::new(0, 0, 1.0), SparseEntry::new(5, 5, 2.0), SparseEntry::new(2, 4, 3.0)];
    let out = nearest_neighbor_densify(&SparseMeasurement::new(6, 6, entries.clone()).unwrap()).unwrap();
    assert_eq!(out.values(), nn_oracle(6, 6, &entries).as_slice());
}

#[test]
fn geometry_inverses() {
    let mut r = rng(19);
    let cam = CameraModel::new(721.5, 721.5, 609.6, 172.9, 0.54, 721.5).unwrap();
    for _ in 0..200 {
        let d = r.random_range(0.1..200.0);
        let back = depth_to_disparity(disparity_to_depth(d, &cam).unwrap(), &cam).unwrap();
        assert!((back - d).abs() <= 1e-12 * d.max(1.0));

        let rot = Rotation3::new(Vector3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)));
        let pose = RigidTransform::new(*rot.matrix(), Vector3::new(r.random(), r.random(), r.random())).unwrap();
        let id = pose.inverse().compose(&pose);
        let (rr, tt) = (id.rotation(), id.translation());
        assert!((rr - nalgebra::Matrix3::identity()).abs().max() <= 1e-12);
        assert!(tt.abs().max() <= 1e-12);

        let x = Point3::new(r.random_range(-20.0..20.0), r.random_range(-5.0..5.0), r.random_range(1.0..80.0));
        let px = project_pi(&cam, &x).unwrap();
        let again = backproject(px, x.z, &cam).unwrap();
        assert!((again - x).norm() <= 1e-9);
    }
}

#[test]
fn stereo_displacement_closed_form() {
    // Against a right camera shifted by the baseline, a pixel with disparity d
    // lands d * fx / focal columns to the left, so the 2D error is the
    // disparity error scaled by fx / focal.
    let cam = CameraModel::new(100.0, 90.0, 40.0, 10.0, 0.5, 80.0).unwrap();
    let mut r = rng(20);
    let (w, h) = (80, 20);
    let reference = DepthMap::new(w, h, (0..w * h).map(|_| r.random_range(1.0..10.0)).collect()).unwrap();
    let estimate = DepthMap::new(w, h, reference.values().iter().map(|v| v + r.random_range(-0.9..0.9)).collect()).unwrap();
    let bins = BinConfig { uncertainty: UncertaintyBins::None, ..Default::default() };
    let rep = evaluate_frame(&estimate, None, &reference, &cam, &RigidTransform::stereo_right(0.5), &EvalPoints::All, &bins).unwrap();
    assert!(rep.records.len() > w * h / 2);
    for p in &rep.records {
        let want = (reference.get(p.row, p.col) - estimate.get(p.row, p.col)).abs() * cam.fx / cam.focal;
        assert!((p.delta2d - want).abs() <= 1e-9, "{} vs {want}", p.delta2d);
        // Visible means both shifted columns stay inside the frame.
        let col = p.col as f64;
        assert!(col - reference.get(p.row, p.col) * cam.fx / cam.focal >= -0.5);
    }
    // Identical cameras: every point reprojects onto its own pixel.
    let same = evaluate_frame(&estimate, None, &reference, &cam, &RigidTransform::identity(), &EvalPoints::All, &bins).unwrap();
    assert_eq!(same.records.len(), w * h);
    assert!(same.records.iter().all(|p| p.delta2d.abs() <= 1e-9));
    assert!(same.records.iter().any(|p| p.delta3d > 0.0));
}

fn naive_scene(p: &SceneParams) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let boxes = draw_boxes(p, &mut rng);
    let mut out = Vec::new();
    for r in 0..p.height {
        for c in 0..p.width {
            let bg = if r < p.horizon_row {
                p.sky_disparity
            } else {
                p.sky_disparity + p.ground_slope * (r - p.horizon_row) as f64
            };
            let v = boxes
                .iter()
                .filter(|b| (b.top..=b.bottom).contains(&r) && (b.left..=b.right).contains(&c))
                .map(|b| b.disparity)
                .fold(bg, f64::max);
            out.push(v);
        }
    }
    if p.noise_std > 0.0 {
        for v in &mut out {
            let n: f64 = rng.sample(StandardNormal);
            *v = (*v + p.noise_std * n).max(0.0);
        }
    }
    out
}

#[test]
fn scenes_match_naive_compositing() {
    for seed in 0..20 {
        for noise in [0.0, 0.3] {
            let p = SceneParams { box_count: 4, noise_std: noise, seed, ..Default::default() };
            let m = generate_scene(&p).unwrap();
            assert_eq!(m.values(), naive_scene(&p).as_slice());
            assert!(m.is_fully_valid() && m.values().iter().all(|v| *v >= 0.0));
        }
    }
}

#[test]
fn ground_is_non_decreasing_without_boxes_or_noise() {
    let p = SceneParams { box_count: 0, noise_std: 0.0, ..Default::default() };
    let m = generate_scene(&p).unwrap();
    for c in 0..p.width {
        for r in p.horizon_row + 1..p.height {
            assert!(m.get(r, c) >= m.get(r - 1, c));
        }
    }
}

#[test]
fn two_jittered_parameters_give_two_dominant_components() {
    let base = SceneParams { box_count: 0, noise_std: 0.0, ..Default::default() };
    let jitter = Jitter { ground_slope: 0.3, sky_disparity: 0.5, ..Default::default() };
    let t = generate_training_set(100, &base, &jitter, 4).unwrap();
    let b = learn_basis(&t, &LearnConfig { min_variance_fraction: 1.0, ..Default::default() }).unwrap();
    assert!(b.cumulative_variance_fraction(2.min(b.l())).unwrap() >= 0.99);
}

#[test]
fn benchmark_corpus_needs_several_components() {
    let jitter = Jitter { horizon_row: 0.25, ground_slope: 0.3, box_count: 0.5, sky_disparity: 0.5 };
    let t = generate_training_set(200, &SceneParams::default(), &jitter, 1001).unwrap();
    let b = learn_basis(&t, &LearnConfig::default()).unwrap();
    assert!(b.l() >= 3, "l = {}", b.l());
    assert!(b.cumulative_variance_fraction(b.l()).unwrap() >= 0.90);
}

#[test]
fn non_orthonormal_basis_file_is_rejected() {
    let mut r = rng(21);
    let b = random_basis(&mut r, 3, 3, 2);
    let mut bytes = io::encode_basis(&b);
    let first_basis_value = 28 + 8 * (9 + 2);
    bytes[first_basis_value..first_basis_value + 8].copy_from_slice(&2.0f64.to_le_bytes());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.pcab");
    std::fs::write(&p, bytes).unwrap();
    assert!(matches!(io::load_basis(&p), Err(Error::InvariantViolation { .. })));
}

#[test]
fn pfm_and_sparse_round_trips() {
    let mut r = rng(22);
    let dir = tempfile::tempdir().unwrap();
    let m = DepthMap::new(13, 11, (0..143).map(|_| r.random_range(0.0..100.0)).collect()).unwrap();
    let p = dir.path().join("m.pfm");
    io::write_depth(&m, &p, io::DepthFormat::Pfm).unwrap();
    let back = io::read_depth(&p, io::DepthFormat::Pfm).unwrap();
    for (a, e) in back.values().iter().zip(m.values()) {
        assert_eq!(*a, *e as f32 as f64);
    }

    let entries: Vec<SparseEntry> = distinct_pixels(&mut r, 400 * 300, 100)
        .into_iter()
        .map(|j| SparseEntry::new(j / 400, j % 400, r.random_range(0.0..200.0)))
        .collect();
    let sp = dir.path().join("s.csv");
    io::write_sparse(&entries, &sp).unwrap();
    assert_eq!(io::read_sparse(&sp).unwrap(), entries);
}

#[test]
fn densify_planted_signal_at_sampled_scene() {
    // Reconstructing a map that lies in the span from every pixel recovers it.
    let mut r = rng(23);
    let b = random_basis(&mut r, 6, 5, 4);
    let y = Coefficients(vec![3.0, -2.0, 1.0, 0.5]);
    let d = b.reconstruct(&y).unwrap();
    let entries = (0..30)
        .map(|j| SparseEntry::new(j / 6, j % 6, d.values()[j]))
        .filter(|e| e.disparity >= 0.0)
        .collect();
    let sparse = SparseMeasurement::new(6, 5, entries).unwrap();
    let rec = densify(&b, &sparse, &MapConfig { sigma_z: 1e-6, ..Default::default() }).unwrap();
    let (lo, hi) = d.min_max().unwrap();
    for (a, e) in rec.dense.values().iter().zip(d.values()) {
        assert!((a - e).abs() <= 1e-4 * (hi - lo));
    }
}
