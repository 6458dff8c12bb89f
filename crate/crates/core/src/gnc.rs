//! Graduated non-convexity with the Leclerc cost, with and without rough
//! trimming.
//!
//! Each iteration solves the weighted rotation problem, computes residuals,
//! then updates weights in closed form: `ω = exp(−r²/(μ²r̄²))`, hard-zeroed
//! when `r²` exceeds both `ξ` and a noise floor, or when the point was
//! already trimmed. `μ` shrinks by `η`
//! and `ξ` by `ν` every iteration. Inliers handed over by RANSIC are never
//! trimmed and carry a boosted weight for the first iterations.

use crate::error::{Error, Result};
use crate::geometry::{CorrespondenceSet, SimilarityTransform};
use crate::solver::{solve_weighted, SolveReport};

/// Which loop to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GncVariant {
    /// Trimming plus boosted RANSIC inliers.
    RtGnc,
    /// Trimming only, no inlier seed.
    RtGncStar,
    /// Plain Leclerc GNC: no trimming, no boosting.
    GncLc,
}

impl GncVariant {
    fn trims(self) -> bool {
        !matches!(self, GncVariant::GncLc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GncParams {
    pub variant: GncVariant,
    /// Divisor applied to `μ` each iteration.
    pub eta: f64,
    /// Shrink factor of the trim bound.
    pub nu: f64,
    /// Weight of RANSIC inliers during the boost iterations.
    pub big_num: f64,
    /// Number of leading iterations with boosted inlier weights.
    pub boost_iterations: usize,
    pub max_it: usize,
    /// Residual scale of the Leclerc cost.
    pub r_bar: f64,
    pub mu_init: f64,
    /// Relative objective change that counts as converged.
    pub conv_tol: f64,
    /// Replaces the `ŝ²` factor of the initial trim bound `ŝ²·max(r²)`.
    pub initial_trim_factor: Option<f64>,
    /// Squared residual at or below which a point is never trimmed, however
    /// small the trim bound gets. `None` means `r̄²`; `Some(0.0)` disables it.
    pub trim_floor: Option<f64>,
}

impl GncParams {
    /// Defaults for `variant` at noise level `sigma`.
    pub fn new(variant: GncVariant, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            variant,
            eta: 1.05,
            nu: 0.45,
            big_num: 200.0,
            boost_iterations: 3,
            max_it: if variant == GncVariant::GncLc { 50 } else { 15 },
            r_bar: 5.95 * sigma,
            mu_init: 10.0,
            conv_tol: 1e-5,
            initial_trim_factor: None,
            trim_floor: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return bad(format!("eta must exceed 1, got {}", self.eta));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad(format!("nu must lie in (0, 1), got {}", self.nu));
        }
        if !(self.big_num >= 1.0 && self.big_num.is_finite()) {
            return bad(format!("big_num must be at least 1, got {}", self.big_num));
        }
        if !(self.r_bar > 0.0 && self.r_bar.is_finite()) {
            return bad(format!("r_bar must be positive, got {}", self.r_bar));
        }
        if !(self.mu_init > 1.0 && self.mu_init.is_finite()) {
            return bad(format!("mu_init must exceed 1, got {}", self.mu_init));
        }
        if self.max_it == 0 {
            return bad("max_it must be at least 1".into());
        }
        if !(self.conv_tol >= 0.0) {
            return bad(format!("conv_tol must be nonnegative, got {}", self.conv_tol));
        }
        if let Some(f) = self.trim_floor {
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("trim_floor must be nonnegative, got {f}"));
            }
        }
        if let Some(f) = self.initial_trim_factor {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("initial_trim_factor must be positive, got {f}"));
            }
        }
        Ok(())
    }
}

/// Telemetry for one completed iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mu: f64,
    /// Trim bound in force while computing this iteration's weights;
    /// infinite for [`GncVariant::GncLc`].
    pub xi: f64,
    /// Value fed to the convergence test.
    pub objective: f64,
    /// Correspondences with nonzero weight in this iteration's solve.
    pub active: usize,
    pub duality_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GncOutcome {
    pub transform: SimilarityTransform,
    pub final_weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub solve_reports: Vec<SolveReport>,
    pub telemetry: Vec<IterationRecord>,
}

/// `rᵢ = ‖s·R·Pᵢ + t − Qᵢ‖`.
pub fn residuals(transform: &SimilarityTransform, set: &CorrespondenceSet) -> Vec<f64> {
    set.src()
        .iter()
        .zip(set.dst())
        .map(|(p, q)| (transform.apply(p) - q).norm())
        .collect()
}

/// Closed-form minimizer of `ω·r² + Ψ(ω)`.
pub fn leclerc_weight(r: f64, mu: f64, r_bar: f64) -> f64 {
    (-(r * r) / (mu * mu * r_bar * r_bar)).exp()
}

/// Leclerc outlier process `μ²r̄²(ω ln ω − ω + 1)` on `ω ∈ (0, 1]`.
///
/// Its limit at `ω → 0⁺` is `μ²r̄²`; callers logging trimmed points should use
/// that value directly.
pub fn outlier_process_psi(omega: f64, mu: f64, r_bar: f64) -> Result<f64> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "outlier process is defined on (0, 1], got {omega}"
        )));
    }
    Ok(mu * mu * r_bar * r_bar * (omega * omega.ln() - omega + 1.0))
}

fn shrink_trim_bound(xi: f64, residuals: &[f64], nu: f64) -> f64 {
    let max_sq = residuals.iter().fold(0.0f64, |m, r| m.max(r * r));
    xi.min(max_sq) * nu
}

/// `min(ξ, max rᵢ²)·ν`.
pub fn trim_bound_update(xi: f64, residuals: &[f64], nu: f64) -> Result<f64> {
    if residuals.is_empty() {
        return Err(Error::Shape("no residuals to bound".into()));
    }
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!("nu must lie in (0, 1), got {nu}")));
    }
    Ok(shrink_trim_bound(xi, residuals, nu))
}

/// RANSIC-seeded trimmed GNC. With [`GncVariant::RtGncStar`] the inlier list
/// must be empty; with [`GncVariant::GncLc`] this is [`gnc_lc`].
pub fn rt_gnc(
    set: &CorrespondenceSet,
    inliers: &[usize],
    s_hat: f64,
    params: &GncParams,
) -> Result<GncOutcome> {
    if params.variant == GncVariant::RtGnc && inliers.is_empty() {
        return Err(Error::Precondition(
            "RT-GNC needs a non-empty inlier seed".into(),
        ));
    }
    if params.variant != GncVariant::RtGnc && !inliers.is_empty() {
        return Err(Error::Precondition(format!(
            "{:?} takes no inlier seed",
            params.variant
        )));
    }
    if let Some(&bad) = inliers.iter().find(|&&i| i >= set.len()) {
        return Err(Error::Shape(format!(
            "inlier index {bad} out of range for {} correspondences",
            set.len()
        )));
    }
    run(set, inliers, s_hat, params)
}

/// Plain Leclerc GNC without trimming or seeding.
pub fn gnc_lc(set: &CorrespondenceSet, s_hat: f64, params: &GncParams) -> Result<GncOutcome> {
    let params = GncParams {
        variant: GncVariant::GncLc,
        ..params.clone()
    };
    run(set, &[], s_hat, &params)
}

/// Relative-change convergence test; a vanishing objective counts as
/// converged.
fn has_converged(previous: f64, current: f64, tol: f64) -> bool {
    current.abs() < 1e-12 || (current - previous).abs() / current.abs() <= tol
}

fn run(
    set: &CorrespondenceSet,
    inliers: &[usize],
    s_hat: f64,
    params: &GncParams,
) -> Result<GncOutcome> {
    params.validate()?;
    if !(s_hat > 0.0 && s_hat.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {s_hat}"
        )));
    }
    if set.is_empty() {
        return Err(Error::Shape("empty correspondence set".into()));
    }
    let n = set.len();
    let mut seeded = vec![false; n];
    for &i in inliers {
        seeded[i] = true;
    }
    let boosted = |t: usize| params.variant == GncVariant::RtGnc && t <= params.boost_iterations;

    let floor = params.trim_floor.unwrap_or(params.r_bar * params.r_bar);
    let mut weights: Vec<f64> = (0..n)
        .map(|i| if seeded[i] && boosted(1) { params.big_num } else { 1.0 })
        .collect();
    let mut mu = params.mu_init;
    let mut xi = f64::INFINITY;
    let mut previous: Option<f64> = None;
    let mut reports = Vec::new();
    let mut telemetry = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=params.max_it {
        iterations = t;
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::AllTrimmed { iteration: t });
        }
        let report = solve_weighted(set, &weights, s_hat)?;
        let transform = SimilarityTransform::new(s_hat, report.rotation, report.translation)?;
        let r = residuals(&transform, set);
        let active = weights.iter().filter(|w| **w > 0.0).count();

        // The trimmed variants track the plain squared error of the points
        // still in play; the weighted objective keeps moving while boosted
        // weights and μ change, and does not settle within the budget.
        let objective = if params.variant.trims() {
            r.iter()
                .zip(&weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(r, _)| r * r)
                .sum()
        } else {
            report.f_hat
        };
        if t == 1 && params.variant.trims() {
            let factor = params.initial_trim_factor.unwrap_or(s_hat * s_hat);
            let max_r = r.iter().fold(0.0f64, |m, v| m.max(*v));
            xi = factor * max_r * max_r;
        }
        telemetry.push(IterationRecord {
            iteration: t,
            mu,
            xi,
            objective,
            active,
            duality_gap: report.duality_gap,
        });
        reports.push(report);

        if let Some(prev) = previous {
            if has_converged(prev, objective, params.conv_tol) {
                converged = true;
                break;
            }
        }
        previous = Some(objective);

        let boost_next = boosted(t + 1);
        for i in 0..n {
            let leclerc = leclerc_weight(r[i], mu, params.r_bar);
            weights[i] = if seeded[i] {
                if boost_next {
                    params.big_num
                } else {
                    leclerc
                }
            } else if params.variant.trims() && (weights[i] == 0.0 || r[i] * r[i] > xi.max(floor)) {
                0.0
            } else {
                leclerc
            };
        }

        mu /= params.eta;
        if params.variant.trims() {
            xi = shrink_trim_bound(xi, &r, params.nu);
        }
        if mu < 1.0 {
            break;
        }
    }

    let last = reports.last().expect("at least one iteration ran");
    let transform = SimilarityTransform::new(s_hat, last.rotation, last.translation)?;
    Ok(GncOutcome {
        transform,
        final_weights: weights,
        iterations,
        converged,
        solve_reports: reports,
        telemetry,
    })
}
