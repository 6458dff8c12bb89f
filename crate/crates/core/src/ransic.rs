//! Random samples with invariant compatibility.
//!
//! Three-correspondence samples are screened by a first gate (per-point
//! scales `sᵢ = ‖Q̃ᵢ‖/‖P̃ᵢ‖` must agree within the noise bound, then the
//! per-point translations `tᵢ = Qᵢ − ŝR̃Pᵢ` must agree) and survivors are
//! pooled. A new survivor that is completely compatible with at least `X`
//! pooled sets (rotation trace test plus the pairwise scale and translation
//! tests on the merged six points) ends the search; the union of those sets
//! is returned as the inlier set together with a weighted scale estimate.

use std::time::Instant;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{triad_rotation, CorrespondenceSet, Point3, RotationMatrix};
use crate::solver::{build_quadratic_form, solve_rotation};

/// Default sampling cap.
pub const DEFAULT_MAX_SAMPLES: u64 = 10_000_000;

/// Window `[lo·scale, hi·scale]` every per-point scale must fall in when the
/// scale is known beforehand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownScaleWindow {
    pub scale: f64,
    pub lo: f64,
    pub hi: f64,
}

impl KnownScaleWindow {
    pub fn new(scale: f64) -> Self {
        Self {
            scale,
            lo: 0.95,
            hi: 1.05,
        }
    }

    fn contains(&self, s: f64) -> bool {
        s >= self.lo * self.scale && s <= self.hi * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansicParams {
    /// Noise bound of the scale test.
    pub alpha: f64,
    /// Noise bound of the translation test.
    pub beta: f64,
    /// Lower bound on `trace(R̃ₐᵀR̃ᵦ)`.
    pub gamma: f64,
    /// Number of pooled sets a new set must be compatible with.
    pub min_compatible: usize,
    pub known_scale: Option<KnownScaleWindow>,
    pub max_samples: u64,
}

impl RansicParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.gamma > 0.0 && self.gamma <= 3.0) {
            return bad(format!("gamma must lie in (0, 3], got {}", self.gamma));
        }
        if self.min_compatible == 0 {
            return bad("min_compatible must be at least 1".into());
        }
        if self.max_samples == 0 {
            return bad("max_samples must be at least 1".into());
        }
        if let Some(w) = &self.known_scale {
            if !(w.scale > 0.0 && w.lo < 1.0 && 1.0 < w.hi) {
                return bad(format!(
                    "known-scale window needs scale > 0 and lo < 1 < hi, got {w:?}"
                ));
            }
        }
        Ok(())
    }
}

/// Midpoints of the recommended parameter ranges for noise level `sigma`.
pub fn default_ransic_params(sigma: f64, extreme: bool) -> Result<RansicParams> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(RansicParams {
        alpha: 4.95 * sigma,
        beta: 5.95 * sigma,
        gamma: (297.0 * sigma).min(3.0),
        min_compatible: if extreme { 3 } else { 2 },
        known_scale: None,
        max_samples: DEFAULT_MAX_SAMPLES,
    })
}

/// A sample that passed the first compatibility gate.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePointSet {
    pub indices: [usize; 3],
    pub demeaned_src: [Point3; 3],
    pub demeaned_dst: [Point3; 3],
    pub scale_invariants: [f64; 3],
    pub local_scale: f64,
    pub local_rotation: RotationMatrix,
    pub translation_invariants: [Vector3<f64>; 3],
}

impl ThreePointSet {
    fn shared_correspondences(&self, other: &ThreePointSet) -> usize {
        self.indices.iter().filter(|i| other.indices.contains(i)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansicResult {
    pub scale_hat: f64,
    /// Sorted, deduplicated correspondence indices.
    pub inlier_indices: Vec<usize>,
    pub samples_drawn: u64,
    pub pool_size_at_exit: usize,
}

fn scale_bound(alpha: f64, norm_i: f64, norm_j: f64) -> f64 {
    alpha * (1.0 / norm_i + 1.0 / norm_j)
}

/// Weighted scale `Σ υᵢsᵢ / Σ υᵢ` with `υᵢ ∝ ‖P̃ᵢ‖²`.
fn weighted_scale(src_norms: &[f64], scales: &[f64]) -> f64 {
    let (num, den) = src_norms
        .iter()
        .zip(scales)
        .fold((0.0, 0.0), |(n, d), (r, s)| (n + r * r * s, d + r * r));
    num / den
}

fn mean(points: impl Iterator<Item = Point3>) -> Point3 {
    let (sum, n) = points.fold((Vector3::zeros(), 0usize), |(s, n), p| (s + p, n + 1));
    sum / n as f64
}

/// First gate: optional known-scale window, scale compatibility, then
/// translation compatibility. Degenerate samples are rejected, not errors.
pub fn first_compatibility(
    set: &CorrespondenceSet,
    indices: [usize; 3],
    params: &RansicParams,
) -> Option<ThreePointSet> {
    let [a, b, c] = indices;
    if a == b || a == c || b == c {
        return None;
    }
    let src = indices.map(|i| set.src()[i]);
    let dst = indices.map(|i| set.dst()[i]);
    let pc = mean(src.iter().copied());
    let qc = mean(dst.iter().copied());
    let demeaned_src = src.map(|p| p - pc);
    let demeaned_dst = dst.map(|q| q - qc);
    let src_norms = demeaned_src.map(|p| p.norm());
    if src_norms.iter().any(|n| !(*n > 0.0)) {
        return None;
    }
    let scale_invariants = [0, 1, 2].map(|i| demeaned_dst[i].norm() / src_norms[i]);

    if let Some(window) = &params.known_scale {
        if !scale_invariants.iter().all(|s| window.contains(*s)) {
            return None;
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let diff = (scale_invariants[i] - scale_invariants[j]).abs();
        if diff > scale_bound(params.alpha, src_norms[i], src_norms[j]) {
            return None;
        }
    }

    let local_scale = weighted_scale(&src_norms, &scale_invariants);
    let local_rotation = triad_rotation(&demeaned_src, &demeaned_dst).ok()?;
    let translation_invariants =
        [0, 1, 2].map(|i| dst[i] - local_scale * local_rotation.rotate(&src[i]));
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if (translation_invariants[i] - translation_invariants[j]).norm() > 2.0 * params.beta {
            return None;
        }
    }

    Some(ThreePointSet {
        indices,
        demeaned_src,
        demeaned_dst,
        scale_invariants,
        local_scale,
        local_rotation,
        translation_invariants,
    })
}

/// Second gate between two sets that passed the first one.
///
/// (i) `trace(R̃ₐᵀR̃ᵦ) ≥ γ`; (ii) on the merged six correspondences, with
/// centroids, scale and a least-squares rotation recomputed over all six,
/// every pair satisfies the scale and translation inequalities. Sets that
/// share two or more correspondences add at most one new point, so they are
/// never compatible.
pub fn complete_compatibility(
    a: &ThreePointSet,
    b: &ThreePointSet,
    params: &RansicParams,
    set: &CorrespondenceSet,
) -> bool {
    if a.shared_correspondences(b) > 1 {
        return false;
    }
    let trace = (a.local_rotation.transpose() * b.local_rotation).trace();
    if !(trace >= params.gamma) {
        return false;
    }

    let indices: Vec<usize> = a.indices.iter().chain(&b.indices).copied().collect();
    let merged = set.subset(&indices);
    let pc = mean(merged.src().iter().copied());
    let qc = mean(merged.dst().iter().copied());
    let src_norms: Vec<f64> = merged.src().iter().map(|p| (p - pc).norm()).collect();
    if src_norms.iter().any(|n| !(*n > 0.0)) {
        return false;
    }
    let scales: Vec<f64> = merged
        .dst()
        .iter()
        .zip(&src_norms)
        .map(|(q, n)| (q - qc).norm() / n)
        .collect();

    for i in 0..6 {
        for j in (i + 1)..6 {
            if (scales[i] - scales[j]).abs() > scale_bound(params.alpha, src_norms[i], src_norms[j])
            {
                return false;
            }
        }
    }

    let scale = weighted_scale(&src_norms, &scales);
    let Ok(form) = build_quadratic_form(&merged, &[1.0; 6], scale) else {
        return false;
    };
    let Ok((q, _)) = solve_rotation(&form) else {
        return false;
    };
    let rotation = q.to_rotation();
    let translations: Vec<Vector3<f64>> = merged
        .src()
        .iter()
        .zip(merged.dst())
        .map(|(p, q)| q - scale * rotation.rotate(p))
        .collect();
    for i in 0..6 {
        for j in (i + 1)..6 {
            if (translations[i] - translations[j]).norm() > 2.0 * params.beta {
                return false;
            }
        }
    }
    true
}

fn draw_triple(rng: &mut ChaCha8Rng, n: usize) -> [usize; 3] {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut c = rng.random_range(0..n - 2);
    if c >= lo {
        c += 1;
    }
    if c >= hi {
        c += 1;
    }
    [a, b, c]
}

/// Weighted scale over `indices` with their own centroids.
pub fn inlier_scale(set: &CorrespondenceSet, indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::Precondition("no inliers to estimate scale from".into()));
    }
    let pc = mean(indices.iter().map(|&i| set.src()[i]));
    let qc = mean(indices.iter().map(|&i| set.dst()[i]));
    let (num, den) = indices.iter().fold((0.0, 0.0), |(n, d), &i| {
        let rp = (set.src()[i] - pc).norm();
        let rq = (set.dst()[i] - qc).norm();
        // υᵢsᵢ = ‖P̃ᵢ‖²·(‖Q̃ᵢ‖/‖P̃ᵢ‖)
        (n + rp * rq, d + rp * rp)
    });
    let scale = num / den;
    if scale > 0.0 && scale.is_finite() {
        Ok(scale)
    } else {
        Err(Error::Precondition(format!(
            "inlier scale is not positive ({scale})"
        )))
    }
}

/// Runs the sampling loop until a set is compatible with `min_compatible`
/// pooled sets, or `max_samples` draws have been made.
pub fn ransic(set: &CorrespondenceSet, params: &RansicParams, seed: u64) -> Result<RansicResult> {
    params.validate()?;
    set.require_len(6)?;
    let n = set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<ThreePointSet> = Vec::new();

    for drawn in 1..=params.max_samples {
        let triple = draw_triple(&mut rng, n);
        let Some(sample) = first_compatibility(set, triple, params) else {
            continue;
        };
        let compatible: Vec<&ThreePointSet> = pool
            .iter()
            .filter(|p| complete_compatibility(&sample, p, params, set))
            .collect();
        if compatible.len() >= params.min_compatible {
            let mut inliers: Vec<usize> = sample
                .indices
                .iter()
                .chain(compatible.iter().flat_map(|p| p.indices.iter()))
                .copied()
                .collect();
            inliers.sort_unstable();
            inliers.dedup();
            let scale_hat = inlier_scale(set, &inliers)?;
            return Ok(RansicResult {
                scale_hat,
                inlier_indices: inliers,
                samples_drawn: drawn,
                pool_size_at_exit: pool.len(),
            });
        }
        pool.push(sample);
    }
    Err(Error::NoConsensus {
        samples_drawn: params.max_samples,
        pool_size: pool.len(),
    })
}

/// [`ransic`] plus its wall time.
pub fn ransic_timed(
    set: &CorrespondenceSet,
    params: &RansicParams,
    seed: u64,
) -> (Result<RansicResult>, std::time::Duration) {
    let start = Instant::now();
    let result = ransic(set, params, seed);
    (result, start.elapsed())
}
