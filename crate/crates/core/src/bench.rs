//! Monte-Carlo sweeps over outlier ratios, solvers and seeds.
//!
//! Runs execute in parallel; records come back ordered by
//! (ratio, solver, run), so the CSV output depends only on the inputs.
//! Wall times go to a separate file to keep `results.csv` reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::{ransac_baseline, DEFAULT_MAX_ITERATIONS};
use crate::error::{Error, Result};
use crate::geometry::{Point3, SimilarityTransform};
use crate::gnc::{gnc_lc, rt_gnc, GncParams, GncVariant};
use crate::metrics::{evaluate_estimate, DEFAULT_RETAINED_THRESHOLD};
use crate::pipeline::{default_config, iron, ScaleMode};
use crate::ransic::ransic;
use crate::synth::{make_problem, ClutterCenter, GeneratedProblem, ProblemSpec};

/// Rotation error below which a run counts as a success, in degrees.
pub const SUCCESS_ROTATION_DEG: f64 = 1.0;
/// Translation error below which a run counts as a success.
pub const SUCCESS_TRANSLATION: f64 = 0.02;
/// Scale error below which an unknown-scale run counts as a success.
pub const SUCCESS_SCALE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Solver {
    Iron,
    /// Same pipeline; kept as a separate label for the ablation tables.
    IronNoStar,
    GncLc,
    RtGncStar,
    Ransac,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Iron => "iron",
            Solver::IronNoStar => "iron-nostar",
            Solver::GncLc => "gnc-lc",
            Solver::RtGncStar => "rt-gnc-star",
            Solver::Ransac => "ransac",
        }
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "iron" => Solver::Iron,
            "iron-nostar" => Solver::IronNoStar,
            "gnc-lc" => Solver::GncLc,
            "rt-gnc-star" => Solver::RtGncStar,
            "ransac" => Solver::Ransac,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown solver `{other}` (expected iron, iron-nostar, gnc-lc, rt-gnc-star or ransac)"
                )))
            }
        })
    }
}

/// Ground-truth scale of the generated problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchScale {
    /// Fixed scale, given to the solvers.
    Known(f64),
    /// Drawn uniformly from the range and estimated by the solvers.
    Unknown(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ratios: Vec<f64>,
    pub solvers: Vec<Solver>,
    pub runs: usize,
    pub seed: u64,
    pub n_points: usize,
    pub sigma: f64,
    pub scale: BenchScale,
    pub clutter_center: ClutterCenter,
    /// Overrides RANSIC's sampling cap.
    pub max_samples: Option<u64>,
    pub ransac_iterations: u64,
    pub extreme: bool,
}

impl BenchConfig {
    pub fn new(ratios: Vec<f64>, solvers: Vec<Solver>, runs: usize, seed: u64) -> Self {
        Self {
            ratios,
            solvers,
            runs,
            seed,
            n_points: 1000,
            sigma: 0.01,
            scale: BenchScale::Known(1.0),
            clutter_center: ClutterCenter::Centroid,
            max_samples: None,
            ransac_iterations: DEFAULT_MAX_ITERATIONS,
            extreme: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratios.is_empty() || self.solvers.is_empty() || self.runs == 0 {
            return Err(Error::InvalidParameter(
                "need at least one ratio, one solver and one run".into(),
            ));
        }
        for &ratio in &self.ratios {
            self.problem_spec(ratio, 0).validate()?;
        }
        if let BenchScale::Known(s) = self.scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("known scale must be positive, got {s}")));
            }
        }
        Ok(())
    }

    fn problem_spec(&self, ratio: f64, seed: u64) -> ProblemSpec {
        let range = match self.scale {
            BenchScale::Known(s) => (s, s),
            BenchScale::Unknown(lo, hi) => (lo, hi),
        };
        let mut spec = ProblemSpec::new(self.n_points, ratio, self.sigma, range, seed);
        spec.clutter_center = self.clutter_center;
        spec
    }

    fn known_scale(&self) -> Option<f64> {
        match self.scale {
            BenchScale::Known(s) => Some(s),
            BenchScale::Unknown(..) => None,
        }
    }
}

/// One row of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub ratio: f64,
    pub solver: &'static str,
    pub run: usize,
    pub problem_seed: u64,
    pub n_points: usize,
    pub sigma: f64,
    pub scale_true: f64,
    pub scale_est: f64,
    pub scale_error: f64,
    pub rotation_error_deg: f64,
    pub translation_error: f64,
    pub recall_cond1: f64,
    pub recall_cond2: f64,
    pub iterations: u64,
    pub duality_gap: f64,
    pub ransic_samples: u64,
    pub success: bool,
    pub error: String,
}

/// Wall time of one run, written to `timings.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRecord {
    pub ratio: f64,
    pub solver: &'static str,
    pub run: usize,
    pub ransic_s: f64,
    pub gnc_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub timings: Vec<TimingRecord>,
}

/// Seed of the problem for (ratio index, run); shared by all solvers.
fn problem_seed(base: u64, ratio_index: usize, run: usize) -> u64 {
    // splitmix64 finalizer over the packed coordinates
    let mut z = base
        .wrapping_add((ratio_index as u64) << 32)
        .wrapping_add(run as u64)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Estimate {
    transform: SimilarityTransform,
    weights: Vec<f64>,
    iterations: u64,
    duality_gap: f64,
    ransic_samples: u64,
    ransic_time: Duration,
    gnc_time: Duration,
}

fn run_solver(
    solver: Solver,
    problem: &GeneratedProblem,
    config: &BenchConfig,
    seed: u64,
) -> Result<Estimate> {
    let set = &problem.correspondences;
    let mode = match config.known_scale() {
        Some(s) => ScaleMode::Known(s),
        None => ScaleMode::Unknown,
    };
    let mut iron_config = default_config(config.sigma, mode, config.extreme)?;
    iron_config.seed = seed;
    if let Some(cap) = config.max_samples {
        iron_config.ransic.max_samples = cap;
    }

    match solver {
        Solver::Iron | Solver::IronNoStar => {
            let r = iron(set, &iron_config)?;
            Ok(Estimate {
                duality_gap: r.gnc.solve_reports.last().map_or(f64::NAN, |s| s.duality_gap),
                iterations: r.gnc.iterations as u64,
                ransic_samples: r.ransic.samples_drawn,
                ransic_time: r.timings.ransic,
                gnc_time: r.timings.gnc,
                transform: r.transform,
                weights: r.inlier_weights,
            })
        }
        Solver::GncLc | Solver::RtGncStar => {
            // These variants take no inlier seed; without a known scale they
            // borrow RANSIC's estimate.
            let start = Instant::now();
            let (scale, samples) = match config.known_scale() {
                Some(s) => (s, 0),
                None => {
                    let found =
                        ransic(set, &iron_config.ransic, seed).map_err(|e| e.in_stage("ransic"))?;
                    (found.scale_hat, found.samples_drawn)
                }
            };
            let ransic_time = start.elapsed();
            let start = Instant::now();
            let out = if solver == Solver::GncLc {
                gnc_lc(set, scale, &GncParams::new(GncVariant::GncLc, config.sigma)?)
            } else {
                rt_gnc(set, &[], scale, &GncParams::new(GncVariant::RtGncStar, config.sigma)?)
            }
            .map_err(|e| e.in_stage("gnc"))?;
            Ok(Estimate {
                duality_gap: out.solve_reports.last().map_or(f64::NAN, |s| s.duality_gap),
                iterations: out.iterations as u64,
                ransic_samples: samples,
                ransic_time,
                gnc_time: start.elapsed(),
                transform: out.transform,
                weights: out.final_weights,
            })
        }
        Solver::Ransac => {
            let start = Instant::now();
            let out = ransac_baseline(set, config.sigma, config.ransac_iterations, seed, config.known_scale())?;
            Ok(Estimate {
                weights: out.weights(set.len()),
                transform: out.transform,
                iterations: out.hypotheses,
                duality_gap: f64::NAN,
                ransic_samples: 0,
                ransic_time: Duration::ZERO,
                gnc_time: start.elapsed(),
            })
        }
    }
}

fn record_run(
    config: &BenchConfig,
    ratio: f64,
    solver: Solver,
    run: usize,
    seed: u64,
    problem: &GeneratedProblem,
) -> (RunRecord, TimingRecord) {
    let truth = &problem.ground_truth;
    let mut record = RunRecord {
        ratio,
        solver: solver.name(),
        run,
        problem_seed: seed,
        n_points: config.n_points,
        sigma: config.sigma,
        scale_true: truth.scale,
        scale_est: f64::NAN,
        scale_error: f64::INFINITY,
        rotation_error_deg: 180.0,
        translation_error: f64::INFINITY,
        recall_cond1: 0.0,
        recall_cond2: 0.0,
        iterations: 0,
        duality_gap: f64::NAN,
        ransic_samples: 0,
        success: false,
        error: String::new(),
    };
    let mut timing = TimingRecord {
        ratio,
        solver: solver.name(),
        run,
        ransic_s: 0.0,
        gnc_s: 0.0,
        total_s: 0.0,
    };
    let outcome = run_solver(solver, problem, config, seed.wrapping_add(1)).and_then(|est| {
        let m = evaluate_estimate(&est.transform, &est.weights, problem, DEFAULT_RETAINED_THRESHOLD)?;
        Ok((est, m))
    });
    match outcome {
        Ok((est, m)) => {
            record.scale_est = est.transform.scale;
            record.scale_error = m.scale_error;
            record.rotation_error_deg = m.rotation_error_deg;
            record.translation_error = m.translation_error;
            record.recall_cond1 = m.recall_cond1;
            record.recall_cond2 = m.recall_cond2;
            record.iterations = est.iterations;
            record.duality_gap = est.duality_gap;
            record.ransic_samples = est.ransic_samples;
            record.success = m.rotation_error_deg < SUCCESS_ROTATION_DEG
                && m.translation_error < SUCCESS_TRANSLATION
                && (config.known_scale().is_some() || m.scale_error < SUCCESS_SCALE);
            timing.ransic_s = est.ransic_time.as_secs_f64();
            timing.gnc_s = est.gnc_time.as_secs_f64();
            timing.total_s = timing.ransic_s + timing.gnc_s;
        }
        Err(e) => record.error = e.to_string(),
    }
    (record, timing)
}

/// Runs the whole sweep. Problems are regenerated per job from their seed,
/// so every solver sees the same problem for a given (ratio, run).
pub fn run_benchmark(config: &BenchConfig, source_cloud: Option<&[Point3]>) -> Result<BenchOutput> {
    config.validate()?;
    let mut jobs = Vec::new();
    for (ri, &ratio) in config.ratios.iter().enumerate() {
        for &solver in &config.solvers {
            for run in 0..config.runs {
                jobs.push((ri, ratio, solver, run));
            }
        }
    }
    let rows: Vec<Result<(RunRecord, TimingRecord)>> = jobs
        .par_iter()
        .map(|&(ri, ratio, solver, run)| {
            let seed = problem_seed(config.seed, ri, run);
            let problem = make_problem(&config.problem_spec(ratio, seed), source_cloud)?;
            Ok(record_run(config, ratio, solver, run, seed, &problem))
        })
        .collect();
    let mut records = Vec::with_capacity(rows.len());
    let mut timings = Vec::with_capacity(rows.len());
    for row in rows {
        let (r, t) = row?;
        records.push(r);
        timings.push(t);
    }
    Ok(BenchOutput { records, timings })
}

/// Median and interquartile range (linear interpolation between order
/// statistics). NaNs are ignored.
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        if lo == hi {
            v[lo]
        } else {
            v[lo] + (v[hi] - v[lo]) * frac
        }
    };
    (q(0.5), q(0.75) - q(0.25))
}

/// One row of `summary.csv`: a (ratio, solver) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRecord {
    pub ratio: f64,
    pub solver: &'static str,
    pub runs: usize,
    pub successes: usize,
    pub failures: usize,
    pub rotation_error_deg_median: f64,
    pub rotation_error_deg_iqr: f64,
    pub translation_error_median: f64,
    pub translation_error_iqr: f64,
    pub scale_error_median: f64,
    pub scale_error_iqr: f64,
    pub recall_cond1_median: f64,
    pub recall_cond2_median: f64,
    pub iterations_median: f64,
    pub iterations_iqr: f64,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRecord> {
    let mut cells: Vec<(f64, &'static str)> = Vec::new();
    for r in records {
        if !cells.iter().any(|c| c.0 == r.ratio && c.1 == r.solver) {
            cells.push((r.ratio, r.solver));
        }
    }
    cells
        .into_iter()
        .map(|(ratio, solver)| {
            let rows: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.ratio == ratio && r.solver == solver)
                .collect();
            let col = |f: fn(&RunRecord) -> f64| median_iqr(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            let rot = col(|r| r.rotation_error_deg);
            let trans = col(|r| r.translation_error);
            let scale = col(|r| r.scale_error);
            let its = col(|r| r.iterations as f64);
            SummaryRecord {
                ratio,
                solver,
                runs: rows.len(),
                successes: rows.iter().filter(|r| r.success).count(),
                failures: rows.iter().filter(|r| !r.error.is_empty()).count(),
                rotation_error_deg_median: rot.0,
                rotation_error_deg_iqr: rot.1,
                translation_error_median: trans.0,
                translation_error_iqr: trans.1,
                scale_error_median: scale.0,
                scale_error_iqr: scale.1,
                recall_cond1_median: col(|r| r.recall_cond1).0,
                recall_cond2_median: col(|r| r.recall_cond2).0,
                iterations_median: its.0,
                iterations_iqr: its.1,
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> std::result::Result<(), BenchIoError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| BenchIoError::new(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| BenchIoError::new(path, e))?;
    }
    writer.flush().map_err(|e| BenchIoError::new(path, e))
}

/// Failure to write a benchmark artifact.
#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {message}")]
pub struct BenchIoError {
    pub path: PathBuf,
    pub message: String,
}

impl BenchIoError {
    fn new(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

/// Writes `results.csv`, `summary.csv` and `timings.csv` into `dir`, which
/// must already exist, plus SVG charts when `plots` is set. Returns the
/// paths written.
pub fn write_outputs(dir: &Path, output: &BenchOutput, plots: bool) -> std::result::Result<Vec<PathBuf>, BenchIoError> {
    if !dir.is_dir() {
        return Err(BenchIoError::new(dir, "output directory does not exist"));
    }
    let mut written = Vec::new();
    let results = dir.join("results.csv");
    write_csv(&results, &output.records)?;
    written.push(results);
    let summary = summarize(&output.records);
    let summary_path = dir.join("summary.csv");
    write_csv(&summary_path, &summary)?;
    written.push(summary_path);
    let timings = dir.join("timings.csv");
    write_csv(&timings, &output.timings)?;
    written.push(timings);
    if plots {
        let charts: [(&str, &str, fn(&SummaryRecord) -> f64); 3] = [
            ("rotation_error.svg", "median rotation error (deg)", |s| s.rotation_error_deg_median),
            ("translation_error.svg", "median translation error", |s| s.translation_error_median),
            ("scale_error.svg", "median scale error", |s| s.scale_error_median),
        ];
        for (file, label, metric) in charts {
            let path = dir.join(file);
            fs::write(&path, line_chart(&summary, label, metric)).map_err(|e| BenchIoError::new(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];

/// Error-vs-ratio line chart on a log axis, one line per solver.
pub fn line_chart(summary: &[SummaryRecord], label: &str, metric: fn(&SummaryRecord) -> f64) -> String {
    let (w, h, m) = (640.0, 400.0, 60.0);
    let mut solvers: Vec<&str> = Vec::new();
    for s in summary {
        if !solvers.contains(&s.solver) {
            solvers.push(s.solver);
        }
    }
    let ratios: Vec<f64> = summary.iter().map(|s| s.ratio).collect();
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
    let logs: Vec<f64> = summary
        .iter()
        .map(|s| metric(s).max(1e-6).log10())
        .filter(|v| v.is_finite())
        .collect();
    let (ymin, ymax) = logs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let (ymin, ymax) = if logs.is_empty() { (0.0, 1.0) } else { (ymin.floor(), ymax.ceil().max(ymin.floor() + 1.0)) };
    let x = |r: f64| if rmax > rmin { m + (r - rmin) / (rmax - rmin) * (w - 2.0 * m) } else { w / 2.0 };
    let y = |v: f64| h - m - (v - ymin) / (ymax - ymin) * (h - 2.0 * m);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - m, w - m, h - m);
    let _ = writeln!(svg, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">outlier ratio</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(svg, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{label} (log10)</text>"#, h / 2.0, h / 2.0);
    let mut exp = ymin;
    while exp <= ymax {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">1e{exp}</text>"#, m - 5.0, y(exp) + 4.0);
        exp += 1.0;
    }
    let mut seen = Vec::new();
    for r in &ratios {
        if !seen.contains(r) {
            seen.push(*r);
            let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{r}</text>"#, x(*r), h - m + 16.0);
        }
    }
    for (k, solver) in solvers.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = summary
            .iter()
            .filter(|s| s.solver == *solver && metric(s).is_finite())
            .map(|s| format!("{:.1},{:.1}", x(s.ratio), y(metric(s).max(1e-6).log10())))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#, points.join(" "));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="{colour}">{solver}</text>"#, w - m + 5.0, m + 16.0 * k as f64);
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_names_round_trip() {
        for s in [Solver::Iron, Solver::IronNoStar, Solver::GncLc, Solver::RtGncStar, Solver::Ransac] {
            assert_eq!(s.name().parse::<Solver>().unwrap(), s);
        }
        assert!("teaser".parse::<Solver>().is_err());
    }

    #[test]
    fn median_and_iqr() {
        assert_eq!(median_iqr(&[3.0, 1.0, 2.0]), (2.0, 1.0));
        assert_eq!(median_iqr(&[1.0, 2.0, 3.0, 4.0]), (2.5, 1.5));
        assert_eq!(median_iqr(&[5.0, f64::NAN]), (5.0, 0.0));
        assert!(median_iqr(&[]).0.is_nan());
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for ri in 0..10 {
            for run in 0..100 {
                assert!(seen.insert(problem_seed(7, ri, run)));
            }
        }
    }

    #[test]
    fn small_sweep_is_ordered_and_deterministic() {
        let mut config = BenchConfig::new(vec![0.5, 0.8], vec![Solver::Iron, Solver::Ransac], 3, 11);
        config.n_points = 200;
        let a = run_benchmark(&config, None).unwrap();
        let b = run_benchmark(&config, None).unwrap();
        let csv = |out: &BenchOutput| {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &out.records {
                w.serialize(r).unwrap();
            }
            w.into_inner().unwrap()
        };
        assert_eq!(csv(&a), csv(&b));
        assert_eq!(a.records.len(), 12);
        let keys: Vec<(f64, &str, usize)> = a.records.iter().map(|r| (r.ratio, r.solver, r.run)).collect();
        assert_eq!(keys[0], (0.5, "iron", 0));
        assert_eq!(keys[3], (0.5, "ransac", 0));
        assert_eq!(keys[6], (0.8, "iron", 0));
        assert!(a.records.iter().filter(|r| r.solver == "iron").all(|r| r.success));
        // Both solvers see the same problem.
        assert_eq!(a.records[0].problem_seed, a.records[3].problem_seed);
    }

    #[test]
    fn outputs_written() {
        let mut config = BenchConfig::new(vec![0.5], vec![Solver::Iron], 2, 1);
        config.n_points = 100;
        let out = run_benchmark(&config, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(dir.path(), &out, true).unwrap();
        assert_eq!(files.len(), 6);
        let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(results.lines().count(), 3);
        assert!(results.starts_with("ratio,solver,run,"));
        let svg = fs::read_to_string(dir.path().join("rotation_error.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
        assert!(write_outputs(&dir.path().join("missing"), &out, false).is_err());
    }

    #[test]
    fn invalid_configs() {
        assert!(BenchConfig::new(vec![], vec![Solver::Iron], 1, 0).validate().is_err());
        assert!(BenchConfig::new(vec![0.5], vec![], 1, 0).validate().is_err());
        assert!(BenchConfig::new(vec![0.5], vec![Solver::Iron], 0, 0).validate().is_err());
        assert!(BenchConfig::new(vec![1.0], vec![Solver::Iron], 1, 0).validate().is_err());
    }
}
