//! End-to-end registration: RANSIC for scale and a seed of inliers, then
//! RT-GNC for rotation, translation and the final inlier weights.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{CorrespondenceSet, SimilarityTransform};
use crate::gnc::{rt_gnc, GncOutcome, GncParams, GncVariant};
use crate::ransic::{default_ransic_params, ransic, KnownScaleWindow, RansicParams, RansicResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleMode {
    Known(f64),
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IronConfig {
    pub mode: ScaleMode,
    pub sigma: f64,
    pub ransic: RansicParams,
    pub gnc: GncParams,
    pub seed: u64,
}

impl IronConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if let ScaleMode::Known(s) = self.mode {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "known scale must be positive, got {s}"
                )));
            }
        }
        if self.gnc.variant != GncVariant::RtGnc {
            return Err(Error::InvalidParameter(format!(
                "the pipeline runs RT-GNC, got {:?}",
                self.gnc.variant
            )));
        }
        self.ransic.validate()?;
        self.gnc.validate()
    }
}

/// Default parameters for noise level `sigma`.
pub fn default_config(sigma: f64, mode: ScaleMode, extreme: bool) -> Result<IronConfig> {
    let mut ransic = default_ransic_params(sigma, extreme)?;
    if let ScaleMode::Known(s) = mode {
        ransic.known_scale = Some(KnownScaleWindow::new(s));
    }
    let config = IronConfig {
        mode,
        sigma,
        ransic,
        gnc: GncParams::new(GncVariant::RtGnc, sigma)?,
        seed: 0,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub ransic: Duration,
    pub gnc: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.ransic + self.gnc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationResult {
    pub transform: SimilarityTransform,
    pub inlier_weights: Vec<f64>,
    pub ransic: RansicResult,
    pub gnc: GncOutcome,
    pub timings: StageTimings,
}

/// Runs the full pipeline.
///
/// In known-scale mode RANSIC only screens samples with the scale window and
/// its scale estimate is replaced by the configured one.
pub fn iron(set: &CorrespondenceSet, config: &IronConfig) -> Result<RegistrationResult> {
    config.validate()?;
    set.require_len(6)?;

    let start = Instant::now();
    let found = ransic(set, &config.ransic, config.seed).map_err(|e| e.in_stage("ransic"))?;
    let ransic_time = start.elapsed();

    let scale = match config.mode {
        ScaleMode::Known(s) => s,
        ScaleMode::Unknown => found.scale_hat,
    };
    let start = Instant::now();
    let outcome =
        rt_gnc(set, &found.inlier_indices, scale, &config.gnc).map_err(|e| e.in_stage("rt-gnc"))?;
    let gnc_time = start.elapsed();

    Ok(RegistrationResult {
        transform: outcome.transform.clone(),
        inlier_weights: outcome.final_weights.clone(),
        ransic: found,
        gnc: outcome,
        timings: StageTimings {
            ransic: ransic_time,
            gnc: gnc_time,
        },
    })
}

/// Declarative configuration file.
///
/// ```toml
/// mode = "known"        # or "unknown"
/// scale = 1.0           # required when mode = "known"
/// sigma = 0.01
/// extreme = false       # X = 3 instead of 2
/// seed = 7
///
/// [ransic]
/// alpha = 0.0495
/// beta = 0.0595
/// gamma = 2.97
/// min_compatible = 2
/// max_samples = 10000000
/// scale_window = [0.95, 1.05]
///
/// [gnc]
/// eta = 1.05
/// nu = 0.45
/// big_num = 200.0
/// boost_iterations = 3
/// max_it = 15
/// r_bar = 0.0595
/// mu_init = 10.0
/// conv_tol = 1e-5
/// initial_trim_factor = 1.0
/// trim_floor = 0.00354
/// ```
///
/// Every key is optional except `sigma`; missing keys take their defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<ModeName>,
    pub scale: Option<f64>,
    pub sigma: Option<f64>,
    pub extreme: Option<bool>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub ransic: RansicSection,
    #[serde(default)]
    pub gnc: GncSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Known,
    Unknown,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RansicSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub min_compatible: Option<usize>,
    pub max_samples: Option<u64>,
    pub scale_window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GncSection {
    pub eta: Option<f64>,
    pub nu: Option<f64>,
    pub big_num: Option<f64>,
    pub boost_iterations: Option<usize>,
    pub max_it: Option<usize>,
    pub r_bar: Option<f64>,
    pub mu_init: Option<f64>,
    pub conv_tol: Option<f64>,
    pub initial_trim_factor: Option<f64>,
    pub trim_floor: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Resolves defaults and overrides into a validated [`IronConfig`].
    pub fn resolve(&self) -> Result<IronConfig> {
        let sigma = self
            .sigma
            .ok_or_else(|| Error::InvalidParameter("config: sigma is required".into()))?;
        let mode = match (self.mode.unwrap_or(ModeName::Unknown), self.scale) {
            (ModeName::Known, Some(s)) => ScaleMode::Known(s),
            (ModeName::Known, None) => {
                return Err(Error::InvalidParameter(
                    "config: mode = \"known\" needs a scale".into(),
                ))
            }
            (ModeName::Unknown, _) => ScaleMode::Unknown,
        };
        let mut config = default_config(sigma, mode, self.extreme.unwrap_or(false))?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }

        let r = &self.ransic;
        let p = &mut config.ransic;
        set_if(&mut p.alpha, r.alpha);
        set_if(&mut p.beta, r.beta);
        set_if(&mut p.gamma, r.gamma);
        set_if(&mut p.min_compatible, r.min_compatible);
        set_if(&mut p.max_samples, r.max_samples);
        if let Some([lo, hi]) = r.scale_window {
            match p.known_scale.as_mut() {
                Some(w) => {
                    w.lo = lo;
                    w.hi = hi;
                }
                None => {
                    return Err(Error::InvalidParameter(
                        "config: scale_window only applies in known-scale mode".into(),
                    ))
                }
            }
        }

        let g = &self.gnc;
        let p = &mut config.gnc;
        set_if(&mut p.eta, g.eta);
        set_if(&mut p.nu, g.nu);
        set_if(&mut p.big_num, g.big_num);
        set_if(&mut p.boost_iterations, g.boost_iterations);
        set_if(&mut p.max_it, g.max_it);
        set_if(&mut p.r_bar, g.r_bar);
        set_if(&mut p.mu_init, g.mu_init);
        set_if(&mut p.conv_tol, g.conv_tol);
        if g.initial_trim_factor.is_some() {
            p.initial_trim_factor = g.initial_trim_factor;
        }
        if g.trim_floor.is_some() {
            p.trim_floor = g.trim_floor;
        }

        config.validate()?;
        Ok(config)
    }
}

fn set_if<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_error, Point3, RotationMatrix};
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noiseless(n: usize, scale: f64) -> (CorrespondenceSet, SimilarityTransform) {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let truth = SimilarityTransform::new(
            scale,
            crate::geometry::exp_map_so3(&Vector3::new(0.4, -1.1, 0.7)),
            Vector3::new(0.2, -0.3, 0.1),
        )
        .unwrap();
        let src: Vec<Point3> = (0..n)
            .map(|_| Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5)))
            .collect();
        let dst = src.iter().map(|p| truth.apply(p)).collect();
        (CorrespondenceSet::new(src, dst).unwrap(), truth)
    }

    #[test]
    fn default_config_values() {
        let c = default_config(0.01, ScaleMode::Unknown, false).unwrap();
        assert_eq!(c.ransic.min_compatible, 2);
        assert_eq!(c.gnc.max_it, 15);
        assert_eq!(c.gnc.nu, 0.45);
        assert!(c.ransic.known_scale.is_none());
        let e = default_config(0.01, ScaleMode::Unknown, true).unwrap();
        assert_eq!(e.ransic.min_compatible, 3);
        assert_eq!(e.gnc, c.gnc);
        assert!(default_config(0.0, ScaleMode::Unknown, false).is_err());
        let k = default_config(0.01, ScaleMode::Known(2.0), false).unwrap();
        assert_eq!(k.ransic.known_scale, Some(KnownScaleWindow::new(2.0)));
    }

    #[test]
    fn noiseless_known_scale_is_exact() {
        let (set, truth) = noiseless(100, 1.0);
        let c = default_config(0.01, ScaleMode::Known(1.0), false).unwrap();
        let r = iron(&set, &c).unwrap();
        assert_eq!(r.transform.scale, 1.0);
        assert!(geodesic_error(&r.transform.rotation, &truth.rotation) < 1e-9);
        assert!((r.transform.translation - truth.translation).norm() < 1e-9);
        let last = r.gnc.solve_reports.last().unwrap();
        assert_eq!(last.duality_gap, 0.0);
        assert!(r.gnc.solve_reports.iter().all(|s| s.certified));
    }

    #[test]
    fn known_and_unknown_agree_on_noiseless_data() {
        let (set, truth) = noiseless(200, 2.5);
        let known = iron(&set, &default_config(0.01, ScaleMode::Known(2.5), false).unwrap()).unwrap();
        let unknown = iron(&set, &default_config(0.01, ScaleMode::Unknown, false).unwrap()).unwrap();
        assert!((unknown.transform.scale - 2.5).abs() < 1e-9);
        assert!(geodesic_error(&known.transform.rotation, &unknown.transform.rotation) < 1e-9);
        assert!(geodesic_error(&known.transform.rotation, &truth.rotation) < 1e-9);
    }

    #[test]
    fn too_few_points() {
        let (set, _) = noiseless(4, 1.0);
        let c = default_config(0.01, ScaleMode::Unknown, false).unwrap();
        assert!(matches!(iron(&set, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn errors_carry_stage_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cloud = |rng: &mut ChaCha8Rng| -> Vec<Point3> {
            (0..50).map(|_| Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5))).collect()
        };
        let set = CorrespondenceSet::new(cloud(&mut rng), cloud(&mut rng)).unwrap();
        let mut c = default_config(0.0001, ScaleMode::Unknown, false).unwrap();
        c.ransic.max_samples = 200;
        let err = iron(&set, &c).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "ransic", .. }));
        assert!(matches!(err.root(), Error::NoConsensus { .. }));
    }

    #[test]
    fn deterministic_given_seed() {
        let (set, _) = noiseless(300, 1.3);
        let c = default_config(0.01, ScaleMode::Unknown, false).unwrap();
        let a = iron(&set, &c).unwrap();
        let b = iron(&set, &c).unwrap();
        assert_eq!(a.transform, b.transform);
        assert_eq!(a.ransic, b.ransic);
        assert_eq!(a.inlier_weights, b.inlier_weights);
    }

    #[test]
    fn rotation_type_is_valid() {
        let (set, _) = noiseless(50, 1.0);
        let r = iron(&set, &default_config(0.01, ScaleMode::Unknown, false).unwrap()).unwrap();
        assert!(RotationMatrix::from_matrix(*r.transform.rotation.matrix()).is_ok());
    }

    #[test]
    fn config_file_overrides() {
        let text = r#"
            mode = "known"
            scale = 2.0
            sigma = 0.02
            seed = 9
            extreme = true
            [ransic]
            alpha = 0.1
            max_samples = 5000
            scale_window = [0.9, 1.1]
            [gnc]
            nu = 0.6
            max_it = 20
            initial_trim_factor = 1.0
            trim_floor = 0.0
        "#;
        let c = ConfigFile::parse(text).unwrap().resolve().unwrap();
        assert_eq!(c.mode, ScaleMode::Known(2.0));
        assert_eq!(c.seed, 9);
        assert_eq!(c.ransic.alpha, 0.1);
        assert!((c.ransic.beta - 5.95 * 0.02).abs() < 1e-15);
        assert_eq!(c.ransic.min_compatible, 3);
        assert_eq!(c.ransic.max_samples, 5000);
        let w = c.ransic.known_scale.unwrap();
        assert_eq!((w.scale, w.lo, w.hi), (2.0, 0.9, 1.1));
        assert_eq!(c.gnc.nu, 0.6);
        assert_eq!(c.gnc.max_it, 20);
        assert_eq!(c.gnc.initial_trim_factor, Some(1.0));
        assert_eq!(c.gnc.trim_floor, Some(0.0));
        assert_eq!(c.gnc.eta, 1.05);
    }

    #[test]
    fn config_file_rejections() {
        assert!(ConfigFile::parse("sigma = 0.01\nbogus = 1").is_err());
        assert!(ConfigFile::parse("mode = \"sideways\"\nsigma = 0.01").is_err());
        assert!(ConfigFile::parse("").unwrap().resolve().is_err());
        assert!(ConfigFile::parse("mode = \"known\"\nsigma = 0.01").unwrap().resolve().is_err());
        assert!(ConfigFile::parse("sigma = 0.01\n[gnc]\nnu = 1.5").unwrap().resolve().is_err());
        assert!(ConfigFile::parse("sigma = 0.01\n[ransic]\nscale_window = [0.9, 1.1]")
            .unwrap()
            .resolve()
            .is_err());
        let d = ConfigFile::parse("sigma = 0.01").unwrap().resolve().unwrap();
        assert_eq!(d, default_config(0.01, ScaleMode::Unknown, false).unwrap());
    }
}
