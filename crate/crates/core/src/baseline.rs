//! Hypothesize-and-test RANSAC with a 3-point minimal solver, used as the
//! comparison baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{triad_rotation, CorrespondenceSet, Point3, SimilarityTransform};
use crate::ransic::inlier_scale;
use crate::solver::solve_weighted;

/// Iteration cap used by the benchmark.
pub const DEFAULT_MAX_ITERATIONS: u64 = 30_000;

/// Confidence of the adaptive stopping rule.
const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub transform: SimilarityTransform,
    /// Consensus set of the refitted model, sorted.
    pub consensus: Vec<usize>,
    pub hypotheses: u64,
}

impl BaselineOutcome {
    /// 1 for consensus members, 0 otherwise.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for &i in &self.consensus {
            w[i] = 1.0;
        }
        w
    }
}

/// Iterations needed to draw one all-inlier triple with [`CONFIDENCE`]
/// when a share `inlier_share` of correspondences are inliers.
pub fn required_iterations(inlier_share: f64) -> f64 {
    let p = inlier_share.powi(3);
    if p >= 1.0 {
        1.0
    } else if p <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 - CONFIDENCE).ln() / (1.0 - p).ln()
    }
}

fn minimal_model(set: &CorrespondenceSet, idx: [usize; 3], known_scale: Option<f64>) -> Option<SimilarityTransform> {
    let src: [Point3; 3] = idx.map(|i| set.src()[i]);
    let dst: [Point3; 3] = idx.map(|i| set.dst()[i]);
    let pc = (src[0] + src[1] + src[2]) / 3.0;
    let qc = (dst[0] + dst[1] + dst[2]) / 3.0;
    let ps = src.map(|p| p - pc);
    let qs = dst.map(|q| q - qc);
    let scale = match known_scale {
        Some(s) => s,
        None => {
            let mut sum = 0.0;
            for k in 0..3 {
                let n = ps[k].norm();
                if n == 0.0 {
                    return None;
                }
                sum += qs[k].norm() / n;
            }
            sum / 3.0
        }
    };
    let rotation = triad_rotation(&ps, &qs).ok()?;
    let translation = qc - scale * rotation.rotate(&pc);
    SimilarityTransform::new(scale, rotation, translation).ok()
}

fn consensus(set: &CorrespondenceSet, model: &SimilarityTransform, threshold: f64) -> Vec<usize> {
    set.src()
        .iter()
        .zip(set.dst())
        .enumerate()
        .filter(|(_, (p, q))| (model.apply(p) - *q).norm() <= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// RANSAC over 3-point hypotheses with inlier threshold `5.95σ`.
///
/// Stops after `max_iterations` or once the adaptive count for the best
/// consensus so far is reached. The winner is refitted on its consensus set
/// with unit weights. With `known_scale` the scale is fixed instead of
/// estimated.
pub fn ransac_baseline(
    set: &CorrespondenceSet,
    sigma: f64,
    max_iterations: u64,
    seed: u64,
    known_scale: Option<f64>,
) -> Result<BaselineOutcome> {
    set.require_len(3)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
    }
    let threshold = 5.95 * sigma;
    let n = set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, SimilarityTransform)> = None;
    let mut drawn = 0;
    while drawn < max_iterations {
        drawn += 1;
        let idx = rand::seq::index::sample(&mut rng, n, 3).into_vec();
        let Some(model) = minimal_model(set, [idx[0], idx[1], idx[2]], known_scale) else {
            continue;
        };
        let support = consensus(set, &model, threshold);
        if support.len() > best.as_ref().map_or(0, |b| b.0.len()) {
            best = Some((support, model));
            let share = best.as_ref().unwrap().0.len() as f64 / n as f64;
            if (drawn as f64) >= required_iterations(share) {
                break;
            }
        } else if let Some((b, _)) = &best {
            if (drawn as f64) >= required_iterations(b.len() as f64 / n as f64) {
                break;
            }
        }
    }

    let Some((support, _)) = best.filter(|b| b.0.len() >= 3) else {
        return Err(Error::NoConsensus {
            samples_drawn: drawn,
            pool_size: 0,
        });
    };
    let inliers = set.subset(&support);
    let scale = match known_scale {
        Some(s) => s,
        None => inlier_scale(set, &support)?,
    };
    let report = solve_weighted(&inliers, &vec![1.0; support.len()], scale)?;
    let transform = SimilarityTransform::new(scale, report.rotation, report.translation)?;
    let mut refit = consensus(set, &transform, threshold);
    if refit.len() < 3 {
        refit = support;
    }
    refit.sort_unstable();
    Ok(BaselineOutcome {
        transform,
        consensus: refit,
        hypotheses: drawn,
    })
}
