//! Accuracy and recall of an estimate against a generated problem.

use crate::error::{Error, Result};
use crate::geometry::{geodesic_error, SimilarityTransform};
use crate::pipeline::RegistrationResult;
use crate::synth::GeneratedProblem;

/// Final weights at or above this count as "weight one".
pub const DEFAULT_RETAINED_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub scale_error: f64,
    pub rotation_error_deg: f64,
    pub translation_error: f64,
    /// Share of true inliers whose weight is at least the threshold.
    pub recall_cond1: f64,
    /// Share of true outliers whose weight is exactly zero.
    pub recall_cond2: f64,
}

/// Recalls are 1 when the corresponding class is empty.
pub fn evaluate_estimate(
    transform: &SimilarityTransform,
    weights: &[f64],
    truth: &GeneratedProblem,
    retained_threshold: f64,
) -> Result<Metrics> {
    let n = truth.inlier_mask.len();
    if weights.len() != n {
        return Err(Error::Shape(format!(
            "{} weights for {n} correspondences",
            weights.len()
        )));
    }
    let gt = &truth.ground_truth;
    let (mut inliers, mut kept, mut outliers, mut rejected) = (0usize, 0usize, 0usize, 0usize);
    for (w, &is_inlier) in weights.iter().zip(&truth.inlier_mask) {
        if is_inlier {
            inliers += 1;
            kept += usize::from(*w >= retained_threshold);
        } else {
            outliers += 1;
            rejected += usize::from(*w == 0.0);
        }
    }
    let share = |hits: usize, total: usize| if total == 0 { 1.0 } else { hits as f64 / total as f64 };
    Ok(Metrics {
        scale_error: (transform.scale - gt.scale).abs(),
        rotation_error_deg: geodesic_error(&transform.rotation, &gt.rotation).to_degrees(),
        translation_error: (transform.translation - gt.translation).norm(),
        recall_cond1: share(kept, inliers),
        recall_cond2: share(rejected, outliers),
    })
}

pub fn evaluate(result: &RegistrationResult, truth: &GeneratedProblem) -> Result<Metrics> {
    evaluate_estimate(
        &result.transform,
        &result.inlier_weights,
        truth,
        DEFAULT_RETAINED_THRESHOLD,
    )
}
