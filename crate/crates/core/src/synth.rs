//! Synthetic registration problems: a cloud in the `[−0.5, 0.5]³` cube, a
//! random similarity transform, Gaussian noise, and a share of destination
//! points replaced by clutter drawn from a ball of diameter `s√3`.

use nalgebra::{Vector3, Vector4};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{CorrespondenceSet, Point3, SimilarityTransform, UnitQuaternion};

/// Where the clutter ball is centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClutterCenter {
    /// Centroid of the transformed cloud, so clutter overlaps the inliers.
    Centroid,
    Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub n_points: usize,
    pub outlier_ratio: f64,
    pub sigma: f64,
    /// Scale drawn uniformly from `[lo, hi]`; `lo == hi` fixes it.
    pub scale_range: (f64, f64),
    pub translation_max: f64,
    pub clutter_center: ClutterCenter,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(n_points: usize, outlier_ratio: f64, sigma: f64, scale_range: (f64, f64), seed: u64) -> Self {
        Self {
            n_points,
            outlier_ratio,
            sigma,
            scale_range,
            translation_max: 3f64.sqrt() / 2.0,
            clutter_center: ClutterCenter::Centroid,
            seed,
        }
    }

    pub fn outlier_count(&self) -> usize {
        (self.outlier_ratio * self.n_points as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_points < 6 {
            return bad(format!("need at least 6 points, got {}", self.n_points));
        }
        if !(0.0..1.0).contains(&self.outlier_ratio) {
            return bad(format!("outlier ratio must lie in [0, 1), got {}", self.outlier_ratio));
        }
        if self.n_points - self.outlier_count().min(self.n_points) < 3 {
            return bad(format!(
                "ratio {} leaves fewer than 3 inliers among {} points",
                self.outlier_ratio, self.n_points
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        let (lo, hi) = self.scale_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("invalid scale range [{lo}, {hi}]"));
        }
        if !(self.translation_max >= 0.0 && self.translation_max.is_finite()) {
            return bad(format!("invalid translation bound {}", self.translation_max));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub correspondences: CorrespondenceSet,
    pub ground_truth: SimilarityTransform,
    pub inlier_mask: Vec<bool>,
    /// Centre and radius of the clutter ball.
    pub clutter_ball: (Point3, f64),
}

/// Uniform sample in the ball of radius `radius` about the origin.
fn in_ball(rng: &mut ChaCha8Rng, radius: f64) -> Vector3<f64> {
    let dir = loop {
        let v: Vector3<f64> = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-12 {
            break v / n;
        }
    };
    dir * radius * rng.random::<f64>().cbrt()
}

fn random_rotation(rng: &mut ChaCha8Rng) -> crate::geometry::RotationMatrix {
    loop {
        let v: Vector4<f64> = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
        if let Ok(q) = UnitQuaternion::normalize(v) {
            return q.to_rotation();
        }
    }
}

/// Translates and uniformly rescales `points` so their bounding box is
/// centred at the origin with longest side 1.
pub fn normalize_to_unit_cube(points: &[Point3]) -> Vec<Point3> {
    let (lo, hi) = points.iter().fold(
        (Vector3::repeat(f64::INFINITY), Vector3::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let centre = (lo + hi) / 2.0;
    let extent = (hi - lo).max();
    let k = if extent > 0.0 { 1.0 / extent } else { 1.0 };
    points
        .iter()
        .map(|p| ((p - centre) * k).map(|c| c.clamp(-0.5, 0.5)))
        .collect()
}

/// Generates one problem; identical spec and cloud give identical output.
pub fn make_problem(spec: &ProblemSpec, source_cloud: Option<&[Point3]>) -> Result<GeneratedProblem> {
    spec.validate()?;
    let n = spec.n_points;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let src: Vec<Point3> = match source_cloud {
        Some(cloud) => {
            if cloud.len() < n {
                return Err(Error::InvalidParameter(format!(
                    "source cloud has {} points, {n} requested",
                    cloud.len()
                )));
            }
            let mut picked: Vec<usize> = sample(&mut rng, cloud.len(), n).into_vec();
            picked.sort_unstable();
            let chosen: Vec<Point3> = picked.iter().map(|&i| cloud[i]).collect();
            normalize_to_unit_cube(&chosen)
        }
        None => (0..n)
            .map(|_| Vector3::from_fn(|_, _| rng.random_range(-0.5..=0.5)))
            .collect(),
    };

    let (lo, hi) = spec.scale_range;
    let scale = if lo == hi { lo } else { rng.random_range(lo..=hi) };
    let rotation = random_rotation(&mut rng);
    let translation = in_ball(&mut rng, spec.translation_max);
    let ground_truth = SimilarityTransform::new(scale, rotation, translation)?;

    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut dst: Vec<Point3> = src
        .iter()
        .map(|p| ground_truth.apply(p) + Vector3::from_fn(|_, _| noise.sample(&mut rng)))
        .collect();

    let centre = match spec.clutter_center {
        ClutterCenter::Centroid => dst.iter().sum::<Vector3<f64>>() / n as f64,
        ClutterCenter::Origin => Vector3::zeros(),
    };
    let radius = scale * 3f64.sqrt() / 2.0;
    let mut inlier_mask = vec![true; n];
    let mut outliers = sample(&mut rng, n, spec.outlier_count()).into_vec();
    outliers.sort_unstable();
    for i in outliers {
        inlier_mask[i] = false;
        dst[i] = centre + in_ball(&mut rng, radius);
    }

    Ok(GeneratedProblem {
        correspondences: CorrespondenceSet::new(src, dst)?,
        ground_truth,
        inlier_mask,
        clutter_ball: (centre, radius),
    })
}
