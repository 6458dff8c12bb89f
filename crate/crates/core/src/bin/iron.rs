use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iron::bench::{run_benchmark, write_outputs, BenchConfig, BenchScale, Solver};
use iron::io::{load_correspondences, load_point_cloud, save_correspondences};
use iron::pipeline::{iron as register, ConfigFile, ModeName};
use iron::synth::{make_problem, ClutterCenter, ProblemSpec};

#[derive(Parser)]
#[command(name = "iron", version, about = "Robust similarity registration from 3D correspondences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over outlier ratios and solvers.
    Bench(BenchArgs),
    /// Register a correspondence CSV and print the transform.
    Register(RegisterArgs),
    /// Write one synthetic problem as a correspondence CSV.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Known,
    Unknown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Center {
    Centroid,
    Origin,
}

impl From<Center> for ClutterCenter {
    fn from(c: Center) -> Self {
        match c {
            Center::Centroid => ClutterCenter::Centroid,
            Center::Origin => ClutterCenter::Origin,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated outlier ratios.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.8,0.9,0.95,0.98,0.99")]
    ratios: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Comma-separated solvers: iron, iron-nostar, gnc-lc, rt-gnc-star, ransac.
    #[arg(long, value_delimiter = ',', default_value = "iron")]
    solver: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    plots: bool,
    #[arg(long, value_enum, default_value = "known")]
    mode: Mode,
    /// Ground-truth scale in known mode.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, default_value_t = 1000)]
    n_points: usize,
    #[arg(long, value_enum, default_value = "centroid")]
    clutter_center: Center,
    /// RANSIC sampling cap.
    #[arg(long)]
    max_samples: Option<u64>,
    /// Sample source clouds from this PLY instead of the unit cube.
    #[arg(long)]
    input_ply: Option<PathBuf>,
    /// Require three compatible sets instead of two.
    #[arg(long)]
    extreme: bool,
}

#[derive(Args)]
struct RegisterArgs {
    #[arg(long)]
    correspondences: PathBuf,
    /// TOML configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_samples: Option<u64>,
    /// Write final weights here, one per line.
    #[arg(long)]
    weights_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    n_points: usize,
    #[arg(long, default_value_t = 0.9)]
    ratio: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "known")]
    mode: Mode,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "centroid")]
    clutter_center: Center,
    #[arg(long)]
    input_ply: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn bench(args: BenchArgs) -> CliResult {
    if !args.out_dir.is_dir() {
        return Err(format!("output directory {} does not exist", args.out_dir.display()).into());
    }
    let solvers = args
        .solver
        .iter()
        .map(|s| s.parse::<Solver>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut config = BenchConfig::new(args.ratios, solvers, args.runs, args.seed);
    config.sigma = args.sigma;
    config.n_points = args.n_points;
    config.clutter_center = args.clutter_center.into();
    config.max_samples = args.max_samples;
    config.extreme = args.extreme;
    config.scale = match args.mode {
        Mode::Known => BenchScale::Known(args.scale),
        Mode::Unknown => BenchScale::Unknown(1.0, 5.0),
    };
    let cloud = args.input_ply.as_deref().map(load_point_cloud).transpose()?;
    let output = run_benchmark(&config, cloud.as_deref())?;
    for path in write_outputs(&args.out_dir, &output, args.plots)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn register_cmd(args: RegisterArgs) -> CliResult {
    let set = load_correspondences(&args.correspondences)?;
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(sigma) = args.sigma {
        file.sigma = Some(sigma);
    }
    if file.sigma.is_none() {
        file.sigma = Some(0.01);
    }
    if let Some(mode) = args.mode {
        file.mode = Some(match mode {
            Mode::Known => ModeName::Known,
            Mode::Unknown => ModeName::Unknown,
        });
    }
    if let Some(scale) = args.scale {
        file.scale = Some(scale);
        if file.mode.is_none() {
            file.mode = Some(ModeName::Known);
        }
    }
    if let Some(seed) = args.seed {
        file.seed = Some(seed);
    }
    if let Some(cap) = args.max_samples {
        file.ransic.max_samples = Some(cap);
    }
    let config = file.resolve()?;
    let result = register(&set, &config)?;
    let t = &result.transform;
    let r = t.rotation.matrix();
    println!("scale {}", t.scale);
    for i in 0..3 {
        println!("rotation {} {} {}", r[(i, 0)], r[(i, 1)], r[(i, 2)]);
    }
    println!("translation {} {} {}", t.translation.x, t.translation.y, t.translation.z);
    let retained = result.inlier_weights.iter().filter(|w| **w > 0.0).count();
    println!("retained {retained} of {}", set.len());
    println!("iterations {}", result.gnc.iterations);
    if let Some(last) = result.gnc.solve_reports.last() {
        println!("duality_gap {} certified {}", last.duality_gap, last.certified);
    }
    if let Some(path) = args.weights_out {
        let text: String = result.inlier_weights.iter().map(|w| format!("{w}\n")).collect();
        fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> CliResult {
    if !args.out_dir.is_dir() {
        return Err(format!("output directory {} does not exist", args.out_dir.display()).into());
    }
    let range = match args.mode {
        Mode::Known => (args.scale, args.scale),
        Mode::Unknown => (1.0, 5.0),
    };
    let mut spec = ProblemSpec::new(args.n_points, args.ratio, args.sigma, range, args.seed);
    spec.clutter_center = args.clutter_center.into();
    let cloud = args.input_ply.as_deref().map(load_point_cloud).transpose()?;
    let problem = make_problem(&spec, cloud.as_deref())?;
    let csv = args.out_dir.join("correspondences.csv");
    save_correspondences(&csv, &problem.correspondences)?;
    let t = &problem.ground_truth;
    let r = t.rotation.matrix();
    let mut truth = format!("scale {}\n", t.scale);
    for i in 0..3 {
        truth += &format!("rotation {} {} {}\n", r[(i, 0)], r[(i, 1)], r[(i, 2)]);
    }
    truth += &format!("translation {} {} {}\n", t.translation.x, t.translation.y, t.translation.z);
    let inliers: Vec<String> = (0..problem.inlier_mask.len())
        .filter(|&i| problem.inlier_mask[i])
        .map(|i| i.to_string())
        .collect();
    truth += &format!("inliers {}\n", inliers.join(" "));
    let truth_path = args.out_dir.join("truth.txt");
    fs::write(&truth_path, truth).map_err(|e| format!("cannot write {}: {e}", truth_path.display()))?;
    println!("wrote {}", csv.display());
    println!("wrote {}", truth_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Register(a) => register_cmd(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
