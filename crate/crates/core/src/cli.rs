//! Command-line interface.
//!
//! Exit codes: 0 success, 1 I/O or image decoding failure, 2 invalid
//! configuration, 3 pipeline failure. Results go to stdout (JSON for counts,
//! CSV for series); diagnostics go to stderr.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::counting::{prepare_mask, run_pipeline, PipelineConfig};
use crate::error::{Error, Stage};
use crate::imageio::{load_gray, save_mask};
use crate::segmentation::{Method, Polarity, SegmentationConfig};
use crate::sizing::{estimate_diameter, extract_runs, Direction};
use crate::synthetic::{
    generate_scene, run_density_experiment, DiscSize, EstimatorConfig, Placement, SceneSpec,
    SizeMethod,
};

pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PIPELINE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "objcount", version, about = "Statistical object counting")]
struct Cli {
    /// key=value file supplying defaults for any long flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count objects in an image and print the result as JSON.
    Count {
        image: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Print the run-length histogram of the segmented image as CSV.
    Histogram {
        image: PathBuf,
        /// Raw run counts (default).
        #[arg(long, conflicts_with = "smoothed")]
        raw: bool,
        /// Mean-filtered histogram.
        #[arg(long)]
        smoothed: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Diameter-estimation error counts over random disc scenes, as CSV.
    Bench {
        /// Comma-separated disc counts.
        #[arg(long, value_delimiter = ',')]
        densities: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        diameter: Option<u32>,
        /// Image size as WIDTHxHEIGHT.
        #[arg(long)]
        size: Option<String>,
        /// Allowed estimate error in pixels.
        #[arg(long)]
        tolerance: Option<f64>,
        /// alpha (smoothed crossing) or peak (raw histogram mode).
        #[arg(long)]
        estimator: Option<String>,
        #[arg(long)]
        placement: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        smooth_window: Option<usize>,
        #[arg(long)]
        direction: Option<String>,
    },
    /// Write a random disc scene as a PGM mask (objects 255, background 0).
    Generate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, conflicts_with = "diameter_range")]
        diameter: Option<u32>,
        /// Inclusive diameter range as MIN-MAX.
        #[arg(long)]
        diameter_range: Option<String>,
        #[arg(long)]
        size: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        placement: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Correction coefficient in (0,1).
    #[arg(long)]
    alpha: Option<f64>,
    /// otsu or region-growing.
    #[arg(long)]
    method: Option<String>,
    /// bright or dark objects.
    #[arg(long)]
    polarity: Option<String>,
    #[arg(long)]
    rg_tolerance: Option<u8>,
    #[arg(long)]
    rg_seed_threshold: Option<u8>,
    #[arg(long)]
    median_window: Option<usize>,
    #[arg(long)]
    smooth_window: Option<usize>,
    /// horizontal or vertical.
    #[arg(long)]
    direction: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    fn config(message: impl Display) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

fn classify(err: &Error) -> u8 {
    match err.root() {
        Error::Io(_)
        | Error::Malformed(_)
        | Error::UnsupportedBitDepth(_)
        | Error::UnsupportedFormat(_)
        | Error::InvalidDimensions { .. } => EXIT_IO,
        Error::InvalidParameter(_) => EXIT_CONFIG,
        _ => EXIT_PIPELINE,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(classify(&err), err)
    }
}

/// Settings from a `key=value` config file.
#[derive(Default)]
struct ConfigFile {
    values: HashMap<String, String>,
}

const CONFIG_KEYS: &[&str] = &[
    "alpha",
    "method",
    "polarity",
    "rg-tolerance",
    "rg-seed-threshold",
    "median-window",
    "smooth-window",
    "direction",
    "densities",
    "trials",
    "seed",
    "diameter",
    "diameter-range",
    "size",
    "tolerance",
    "estimator",
    "placement",
    "n",
];

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::new(EXIT_IO, format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::config(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Failure::config(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Flag value if given, else the config file's, else `None`.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Failure::config(format!("config key {key}: {e}"))),
        }
    }

    fn pick_parsed<T: FromStr>(&self, flag: Option<String>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: Display,
    {
        match self.pick(flag, key)? {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| Failure::config(e)),
        }
    }
}

fn parse_size(raw: &str) -> Result<(u32, u32), Failure> {
    raw.split_once(['x', 'X'])
        .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
        .ok_or_else(|| Failure::config(format!("size must be WIDTHxHEIGHT, got {raw:?}")))
}

fn parse_range(raw: &str) -> Result<DiscSize, Failure> {
    raw.split_once('-')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .map(|(min, max)| DiscSize::Range { min, max })
        .ok_or_else(|| Failure::config(format!("diameter range must be MIN-MAX, got {raw:?}")))
}

fn pipeline_config(args: PipelineArgs, cfg: &ConfigFile) -> Result<PipelineConfig, Failure> {
    let defaults = PipelineConfig::default();
    let seg_defaults = SegmentationConfig::default();
    let config = PipelineConfig {
        segmentation: SegmentationConfig {
            method: cfg
                .pick_parsed::<Method>(args.method, "method")?
                .unwrap_or(seg_defaults.method),
            polarity: cfg
                .pick_parsed::<Polarity>(args.polarity, "polarity")?
                .unwrap_or(seg_defaults.polarity),
            rg_tolerance: cfg
                .pick(args.rg_tolerance, "rg-tolerance")?
                .unwrap_or(seg_defaults.rg_tolerance),
            rg_seed_threshold: cfg
                .pick(args.rg_seed_threshold, "rg-seed-threshold")?
                .unwrap_or(seg_defaults.rg_seed_threshold),
        },
        median_window: cfg
            .pick(args.median_window, "median-window")?
            .unwrap_or(defaults.median_window),
        smooth_window: cfg
            .pick(args.smooth_window, "smooth-window")?
            .unwrap_or(defaults.smooth_window),
        alpha: cfg.pick(args.alpha, "alpha")?.unwrap_or(defaults.alpha),
        direction: cfg
            .pick_parsed::<Direction>(args.direction, "direction")?
            .unwrap_or(defaults.direction),
    };
    config.validate().map_err(Failure::config)?;
    Ok(config)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::new(EXIT_IO, format!("writing output: {e}")))
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };

    match cli.command {
        Command::Count { image, pipeline } => {
            let config = pipeline_config(pipeline, &cfg)?;
            let img = load_gray(&image).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", image.display())))?;
            let result = run_pipeline(&img, &config)?;
            for w in &result.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            write_out(out, &format!("{}\n", result.to_json()))
        }
        Command::Histogram {
            image,
            raw: _,
            smoothed,
            pipeline,
        } => {
            let config = pipeline_config(pipeline, &cfg)?;
            let img = load_gray(&image).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", image.display())))?;
            let (mask, warnings) = prepare_mask(&img, &config)?;
            for w in &warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let hist = extract_runs(&mask, config.direction);
            if hist.is_empty() {
                let header = if smoothed { "length,value\n" } else { "length,count\n" };
                write_out(out, header)?;
                return Err(Error::EmptyHistogram.at(Stage::Sizing).into());
            }
            if smoothed {
                let s = hist
                    .smooth(config.smooth_window)
                    .map_err(|e| e.at(Stage::Sizing))?;
                if let Ok(est) = estimate_diameter(&s, config.alpha) {
                    let _ = writeln!(
                        err,
                        "x_max={} peak={:.6} diameter={} (alpha {})",
                        est.x_max, est.peak, est.diameter, est.alpha
                    );
                }
                write_out(out, &s.to_csv())
            } else {
                write_out(out, &hist.to_csv())
            }
        }
        Command::Bench {
            densities,
            trials,
            seed,
            diameter,
            size,
            tolerance,
            estimator,
            placement,
            alpha,
            smooth_window,
            direction,
        } => {
            let densities = match densities {
                Some(d) => d,
                None => match cfg.values.get("densities") {
                    Some(raw) => raw
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| Failure::config(format!("config key densities: {e}")))?,
                    None => vec![10, 50, 100, 150],
                },
            };
            let trials = cfg.pick(trials, "trials")?.unwrap_or(100);
            let (width, height) = parse_size(&cfg.pick(size, "size")?.unwrap_or("1000x1000".into()))?;
            let template = SceneSpec {
                placement: cfg
                    .pick_parsed::<Placement>(placement, "placement")?
                    .unwrap_or_default(),
                ..SceneSpec::new(
                    width,
                    height,
                    cfg.pick(diameter, "diameter")?.unwrap_or(100),
                    0,
                    cfg.pick(seed, "seed")?.unwrap_or(1),
                )
            };
            let defaults = EstimatorConfig::default();
            let estimator = EstimatorConfig {
                method: cfg
                    .pick_parsed::<SizeMethod>(estimator, "estimator")?
                    .unwrap_or(defaults.method),
                alpha: cfg.pick(alpha, "alpha")?.unwrap_or(defaults.alpha),
                smooth_window: cfg
                    .pick(smooth_window, "smooth-window")?
                    .unwrap_or(defaults.smooth_window),
                direction: cfg
                    .pick_parsed::<Direction>(direction, "direction")?
                    .unwrap_or(defaults.direction),
            };
            if estimator.smooth_window % 2 == 0 {
                return Err(Failure::config("smoothing window must be odd and at least 1"));
            }
            let tolerance = cfg.pick(tolerance, "tolerance")?.unwrap_or(3.0);
            let result = run_density_experiment(&densities, trials, &template, &estimator, tolerance)
                .map_err(|e| Failure::new(classify(&e).max(EXIT_CONFIG), e))?;
            write_out(out, &result.to_csv())
        }
        Command::Generate {
            n,
            diameter,
            diameter_range,
            size,
            seed,
            placement,
            out: path,
        } => {
            let disc = match (diameter, cfg.values.get("diameter-range").cloned().or(diameter_range)) {
                (Some(d), _) => DiscSize::Fixed(d),
                (None, Some(range)) => parse_range(&range)?,
                (None, None) => DiscSize::Fixed(cfg.pick(None, "diameter")?.unwrap_or(100)),
            };
            let (width, height) = parse_size(&cfg.pick(size, "size")?.unwrap_or("1000x1000".into()))?;
            let spec = SceneSpec {
                width,
                height,
                diameter: disc,
                n_discs: cfg.pick(n, "n")?.unwrap_or(0),
                seed: cfg.pick(seed, "seed")?.unwrap_or(1),
                placement: cfg
                    .pick_parsed::<Placement>(placement, "placement")?
                    .unwrap_or_default(),
            };
            let scene = generate_scene(&spec).map_err(Failure::config)?;
            save_mask(&scene.mask, &path)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
            let _ = writeln!(
                err,
                "wrote {} ({} discs, occupancy {:.4}, overlap {:.4})",
                path.display(),
                scene.n_discs,
                scene.occupancy,
                scene.overlap
            );
            Ok(())
        }
    }
}

/// Parse `args` (including the program name) and run the command, returning
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_CONFIG
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
