//! Sparse-to-dense disparity interpolation with a learned PCA prior.
//!
//! A basis is learned once from a corpus of dense disparity maps
//! ([`learn_basis`]). Each sparse measurement is then projected onto that
//! basis by maximum a posteriori estimation with the PCA eigenvalues as the
//! coefficient prior ([`densify`]), which yields a dense map plus an optional
//! per-pixel uncertainty image. A nearest-neighbour baseline, pinhole stereo
//! evaluation measures and a synthetic scene generator round out the toolkit.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod densify;
pub mod depth;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod linalg;
mod nearest;
pub mod pca;
pub mod preprocess;
pub mod synth;

pub use densify::{
    densify, map_estimate, map_objective, nearest_neighbor_densify, normal_equations,
    restrict_basis, uncertainty_image, CovarianceMode, MapConfig, MapEstimate, Reconstruction,
    RestrictedSystem, SparseEntry, SparseMeasurement,
};
pub use depth::{is_valid, DepthMap, Pixel, SENTINEL};
pub use error::{Error, ErrorKind, Result};
pub use eval::{
    evaluate_frame, evaluate_reconstruction, select_samples, BinConfig, EvalPoints, EvalReport,
    Histogram, PointRecord, ReportSummary, SampleStrategy, UncertaintyBins,
};
pub use geometry::{
    backproject, depth_to_disparity, disparity_to_depth, error_2d, error_3d, project_pi,
    transform_point, CameraModel, RigidTransform,
};
pub use pca::{
    compute_mean, cumulative_variance_fraction, learn_basis, Coefficients, LearnConfig, PcaBasis,
    TrainingSet,
};
pub use preprocess::{box_blur, fill_invalid_nearest, prepare_training_map};
pub use synth::{generate_scene, generate_scenes, generate_training_set, Jitter, SceneParams};
