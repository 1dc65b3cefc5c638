//! `pcadepth` command-line interface.
//!
//! Exit codes: 0 success, 1 validation error (including bad flags), 2 I/O or
//! file-format error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crate::densify::{densify, nearest_neighbor_densify, CovarianceMode, MapConfig, SparseMeasurement};
use crate::depth::DepthMap;
use crate::error::{Error, ErrorKind, Result};
use crate::eval::{evaluate_frame, select_samples, BinConfig, EvalPoints, SampleStrategy, UncertaintyBins};
use crate::io::{self, DepthFormat};
use crate::pca::{learn_basis, LearnConfig, TrainingSet};
use crate::preprocess::{box_blur, fill_invalid_nearest};
use crate::synth::generate_scenes;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pcadepth", version, about = "Sparse-to-dense disparity interpolation with a PCA prior")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PCADEPTH_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovarianceArg {
    #[value(alias = "unscaled")]
    Paper,
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Grid,
    Gradient,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus of disparity maps.
    Synth {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Preprocess a corpus, learn and truncate a basis, and save it.
    Learn {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.90)]
        variance: f64,
        #[arg(long, default_value_t = 500)]
        max_components: usize,
        #[arg(long)]
        fill_invalid: bool,
        /// Box blur kernel size (odd).
        #[arg(long)]
        blur: Option<usize>,
    },
    /// Print basis dimensions and variance fractions.
    Info {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        cumsum_csv: Option<PathBuf>,
    },
    /// MAP densification of sparse measurements.
    Densify {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        sparse: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        sigma_z: f64,
        #[arg(long)]
        uncertainty: bool,
        #[arg(long, value_enum, default_value_t = CovarianceArg::Paper)]
        covariance: CovarianceArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        uncertainty_out: Option<PathBuf>,
        #[arg(long)]
        clamp_negative: bool,
    },
    /// Nearest-neighbour densification.
    Baseline {
        #[arg(long)]
        sparse: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select measurement locations and write their reference disparities.
    Sample {
        #[arg(long)]
        depth: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Sample count for random/gradient.
        #[arg(long)]
        k: Option<usize>,
        /// Grid spacing in px.
        #[arg(long)]
        step: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the 2D/3D reprojection error report.
    Evaluate {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long)]
        uncertainty: Option<PathBuf>,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        camera: PathBuf,
        #[arg(long)]
        pose: PathBuf,
        /// Evaluation locations (sparse CSV); all pixels when omitted.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        per_point: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        uncertainty_bins: usize,
    },
    /// Print two reports side by side.
    Compare {
        #[arg(long)]
        report_a: PathBuf,
        #[arg(long)]
        report_b: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{}", e.render());
                    EXIT_VALIDATION
                }
            };
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .try_init();

    let result = match cli.threads {
        Some(0) => Err(Error::invalid("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Validation => EXIT_VALIDATION,
        ErrorKind::Io => EXIT_IO,
        ErrorKind::Numerical => EXIT_NUMERICAL,
    }
}

fn format_of(path: &Path, flag: &str) -> Result<DepthFormat> {
    DepthFormat::from_path(path).ok_or_else(|| {
        Error::invalid(format!("{flag}: {} must end in .pfm or .csv", path.display()))
    })
}

fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Synth { params, count, out } => synth(params, *count, out, cli.seed),
        Command::Learn {
            train,
            out,
            variance,
            max_components,
            fill_invalid,
            blur,
        } => learn(train, out, *variance, *max_components, *fill_invalid, *blur),
        Command::Info { basis, cumsum_csv } => info(basis, cumsum_csv.as_deref()),
        Command::Densify {
            basis,
            sparse,
            sigma_z,
            uncertainty,
            covariance,
            out,
            uncertainty_out,
            clamp_negative,
        } => {
            if !(sigma_z.is_finite() && *sigma_z > 0.0) {
                return Err(Error::invalid(format!("--sigma-z must be positive, got {sigma_z}")));
            }
            let out_fmt = format_of(out, "--out")?;
            let unc_fmt = uncertainty_out
                .as_deref()
                .map(|p| format_of(p, "--uncertainty-out"))
                .transpose()?;
            let config = MapConfig {
                sigma_z: *sigma_z,
                covariance_mode: match covariance {
                    CovarianceArg::Paper => CovarianceMode::Unscaled,
                    CovarianceArg::Scaled => CovarianceMode::SigmaScaled,
                },
                compute_uncertainty: *uncertainty || uncertainty_out.is_some(),
                clamp_negative: *clamp_negative,
            };
            let basis = io::load_basis(basis)?;
            let entries = io::read_sparse(sparse)?;
            let sparse = SparseMeasurement::new(basis.width(), basis.height(), entries)?;
            info!("densifying {} measurements with {} components", sparse.len(), basis.l());
            let recon = densify(&basis, &sparse, &config)?;
            io::write_depth(&recon.dense, out, out_fmt)?;
            let mut text = format!(
                "measurements: {}\ncomponents: {}\n",
                sparse.len(),
                basis.l()
            );
            if let Some(unc) = &recon.uncertainty {
                let (lo, hi) = unc.min_max().unwrap_or((0.0, 0.0));
                let mean = unc.values().iter().sum::<f64>() / unc.len() as f64;
                let _ = writeln!(text, "uncertainty: min {lo} mean {mean} max {hi}");
                if let (Some(p), Some(fmt)) = (uncertainty_out, unc_fmt) {
                    io::write_depth(unc, p, fmt)?;
                }
            }
            Ok(text)
        }
        Command::Baseline {
            sparse,
            width,
            height,
            out,
        } => {
            let fmt = format_of(out, "--out")?;
            let entries = io::read_sparse(sparse)?;
            let sparse = SparseMeasurement::new(*width, *height, entries)?;
            let dense = nearest_neighbor_densify(&sparse)?;
            io::write_depth(&dense, out, fmt)?;
            Ok(format!("measurements: {}\n", sparse.len()))
        }
        Command::Sample {
            depth,
            strategy,
            k,
            step,
            out,
        } => {
            let strategy = match (strategy, k, step) {
                (StrategyArg::Random, Some(k), _) => SampleStrategy::UniformRandom {
                    k: *k,
                    seed: cli.seed.unwrap_or(0),
                },
                (StrategyArg::Gradient, Some(k), _) => SampleStrategy::GradientTop { k: *k },
                (StrategyArg::Grid, _, Some(step)) => SampleStrategy::Grid { step: *step },
                (StrategyArg::Grid, Some(k), None) => SampleStrategy::Grid { step: *k },
                (StrategyArg::Grid, None, None) => {
                    return Err(Error::invalid("--strategy grid needs --step"))
                }
                (_, None, _) => return Err(Error::invalid("--strategy random|gradient needs --k")),
            };
            let map = io::read_depth(depth, format_of(depth, "--depth")?)?;
            let pixels = select_samples(&map, strategy)?;
            let sparse = SparseMeasurement::sample(&map, &pixels)?;
            io::write_sparse(sparse.entries(), out)?;
            Ok(format!("samples: {}\n", sparse.len()))
        }
        Command::Evaluate {
            recon,
            uncertainty,
            reference,
            camera,
            pose,
            points,
            report,
            per_point,
            uncertainty_bins,
        } => {
            let recon_fmt = format_of(recon, "--recon")?;
            let ref_fmt = format_of(reference, "--reference")?;
            let unc_fmt = uncertainty
                .as_deref()
                .map(|p| format_of(p, "--uncertainty"))
                .transpose()?;
            if uncertainty.is_some() && *uncertainty_bins == 0 {
                return Err(Error::invalid("--uncertainty-bins must be at least 1"));
            }
            let estimate = io::read_field(recon, recon_fmt)?;
            let reference = io::read_depth(reference, ref_fmt)?;
            let unc = match (uncertainty, unc_fmt) {
                (Some(p), Some(fmt)) => Some(io::read_depth(p, fmt)?),
                _ => None,
            };
            let cam = io::read_camera(camera)?;
            let pose = io::read_pose(pose)?;
            let eval_points = match points {
                Some(p) => EvalPoints::Pixels(io::read_sparse(p)?.iter().map(|e| e.pixel()).collect()),
                None => EvalPoints::All,
            };
            let bins = BinConfig {
                uncertainty: if unc.is_some() {
                    UncertaintyBins::Quantiles(*uncertainty_bins)
                } else {
                    UncertaintyBins::None
                },
                ..Default::default()
            };
            let rep = evaluate_frame(&estimate, unc.as_ref(), &reference, &cam, &pose, &eval_points, &bins)?;
            io::write_report(&rep.summary, report)?;
            if let Some(p) = per_point {
                io::write_per_point_csv(&rep, p)?;
            }
            Ok(format!(
                "points: {}\ndiscarded: {}\nmean_delta2d: {}\nmean_delta3d: {}\n",
                rep.summary.points,
                rep.summary.discarded,
                fmt_opt(rep.summary.mean_delta2d),
                fmt_opt(rep.summary.mean_delta3d)
            ))
        }
        Command::Compare { report_a, report_b } => {
            let a = io::read_report(report_a)?;
            let b = io::read_report(report_b)?;
            Ok(compare_table(&a, &b))
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"))
}

fn synth(params: &Path, count: usize, out: &Path, seed: Option<u64>) -> Result<String> {
    if count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    let file = io::read_scene_file(params)?;
    let seed = seed.unwrap_or(file.scene.seed);
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let maps = generate_scenes(count, &file.scene, &file.jitter, seed)?;
    for (i, m) in maps.iter().enumerate() {
        io::write_depth(m, out.join(format!("scene_{i:05}.pfm")), DepthFormat::Pfm)?;
    }
    Ok(format!("scenes: {count}\n"))
}

fn learn(
    train: &Path,
    out: &Path,
    variance: f64,
    max_components: usize,
    fill_invalid: bool,
    blur: Option<usize>,
) -> Result<String> {
    if !(variance > 0.0 && variance <= 1.0) {
        return Err(Error::invalid(format!("--variance must lie in (0, 1], got {variance}")));
    }
    if max_components == 0 {
        return Err(Error::invalid("--max-components must be at least 1"));
    }
    if let Some(k) = blur {
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::invalid(format!("--blur must be an odd kernel size, got {k}")));
        }
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(train)
        .map_err(|e| Error::io(train, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| DepthFormat::from_path(p).is_some())
        .collect();
    files.sort();
    info!("learning from {} maps", files.len());
    let maps = files
        .iter()
        .map(|p| {
            let m = io::read_depth(p, DepthFormat::from_path(p).expect("filtered"))?;
            let m: DepthMap = if fill_invalid { fill_invalid_nearest(&m)? } else { m };
            match blur {
                Some(k) => box_blur(&m, k),
                None => Ok(m),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let training = TrainingSet::new(maps)?;
    let basis = learn_basis(
        &training,
        &LearnConfig {
            max_components,
            min_variance_fraction: variance,
            ..Default::default()
        },
    )?;
    io::save_basis(&basis, out)?;
    Ok(format!(
        "maps: {}\ncomponents: {}\nvariance_fraction: {}\n",
        training.len(),
        basis.l(),
        basis.cumulative_variance_fraction(basis.l())?
    ))
}

fn info(path: &Path, cumsum_csv: Option<&Path>) -> Result<String> {
    let basis = io::load_basis(path)?;
    let mut text = String::new();
    let _ = writeln!(text, "width: {}", basis.width());
    let _ = writeln!(text, "height: {}", basis.height());
    let _ = writeln!(text, "components: {}", basis.l());
    let _ = writeln!(text, "total_variance: {}", basis.total_variance());
    let _ = writeln!(text, "variance_fraction: {}", basis.cumulative_variance_fraction(basis.l())?);
    for &k in &[1usize, 2, 5, 10, 20, 50, 100, 200, 500] {
        if k < basis.l() {
            let _ = writeln!(text, "variance_fraction@{k}: {}", basis.cumulative_variance_fraction(k)?);
        }
    }
    if let Some(p) = cumsum_csv {
        let rows: Vec<(usize, f64, f64)> = (1..=basis.l())
            .map(|k| {
                basis
                    .cumulative_variance_fraction(k)
                    .map(|f| (k, basis.eigenvalues()[k - 1], f))
            })
            .collect::<Result<_>>()?;
        io::write_atomic(p, |w| {
            writeln!(w, "k,eigenvalue,cumulative_fraction")?;
            for (k, e, f) in rows {
                writeln!(w, "{k},{e},{f}")?;
            }
            Ok(())
        })?;
    }
    Ok(text)
}

fn compare_table(a: &crate::eval::ReportSummary, b: &crate::eval::ReportSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{:<24}{:>14}{:>14}", "", "A", "B");
    let _ = writeln!(t, "{:<24}{:>14}{:>14}", "points", a.points, b.points);
    let _ = writeln!(t, "{:<24}{:>14}{:>14}", "mean delta2d [px]", fmt_opt(a.mean_delta2d), fmt_opt(b.mean_delta2d));
    let _ = writeln!(t, "{:<24}{:>14}{:>14}", "mean delta3d [m]", fmt_opt(a.mean_delta3d), fmt_opt(b.mean_delta3d));
    if a.delta2d_by_depth.edges == b.delta2d_by_depth.edges {
        for (i, e) in a.delta2d_by_depth.edges.iter().enumerate() {
            let label = match a.delta2d_by_depth.edges.get(i + 1) {
                Some(next) => format!("delta2d depth {e}-{next} m"),
                None => format!("delta2d depth >{e} m"),
            };
            let _ = writeln!(
                t,
                "{:<24}{:>14}{:>14}",
                label,
                fmt_opt(a.delta2d_by_depth.means[i]),
                fmt_opt(b.delta2d_by_depth.means[i])
            );
        }
    }
    if let (Some(x), Some(y)) = (a.mean_delta2d, b.mean_delta2d) {
        if y > 0.0 {
            let _ = writeln!(t, "{:<24}{:>14.4}", "delta2d ratio A/B", x / y);
        }
    }
    t
}
