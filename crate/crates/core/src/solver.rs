//! Known-scale weighted rotation solver with an optimality certificate.
//!
//! With weighted centroids removed, the weighted objective
//! `Σ ωᵢ‖ŝ·R·P̃ᵢ − Q̃ᵢ‖²` equals `qᵀCq + D` for the unit quaternion `q` of `R`,
//! where `C = −2ŝ Σ ωᵢ Π1([Q̃ᵢ;0])ᵀ Π2([P̃ᵢ;0])` (symmetrized) and
//! `D = Σ ωᵢ(ŝ²‖P̃ᵢ‖² + ‖Q̃ᵢ‖²)`. Over the unit sphere the order-one
//! sum-of-squares relaxation `max τ s.t. qᵀCq − τ = φ₀(q) + ζ(1 − qᵀq)` has
//! optimum `τ = λ_min(C)` with `ζ = λ_min` and `φ₀ = qᵀ(C − λ_min I)q`, so the
//! relaxation is solved by a minimum eigenpair and certified by checking that
//! `C − τI` is positive semidefinite.

use nalgebra::{Matrix4, SymmetricEigen, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::geometry::{
    homogenize, pi_matrices, weighted_centroid, CorrespondenceSet, Point3, RotationMatrix,
    UnitQuaternion,
};

/// Largest relative duality gap accepted by the certificate.
pub const GAP_TOL: f64 = 1e-6;
/// Eigenvalue slack, relative to `max(1, max|Cᵢⱼ|)`, of the PSD check.
pub const PSD_TOL: f64 = 1e-9;
/// Objectives below `ZERO_OBJECTIVE_TOL · max(1, D)` count as a perfect fit.
pub const ZERO_OBJECTIVE_TOL: f64 = 1e-12;

/// The quaternion quadratic form of one weighted registration instance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub matrix: Matrix4<f64>,
    pub constant: f64,
    pub src_centroid: Point3,
    pub dst_centroid: Point3,
    pub scale: f64,
}

impl QuadraticForm {
    /// `qᵀCq + D`.
    pub fn evaluate(&self, q: &Vector4<f64>) -> f64 {
        q.dot(&(self.matrix * q)) + self.constant
    }
}

/// Outcome of one certified solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub q_hat: UnitQuaternion,
    pub rotation: RotationMatrix,
    pub translation: Vector3<f64>,
    /// Relaxation optimum shifted by the constant term, `λ_min + D`.
    pub f_star: f64,
    /// Objective at the recovered quaternion, `q̂ᵀCq̂ + D`.
    pub f_hat: f64,
    /// `(f̂ − f*) / f̂`, zero for a perfect fit.
    pub duality_gap: f64,
    pub certified: bool,
}

/// Builds `C` and `D` from weighted, demeaned correspondences.
pub fn build_quadratic_form(
    set: &CorrespondenceSet,
    weights: &[f64],
    s_hat: f64,
) -> Result<QuadraticForm> {
    if !(s_hat.is_finite() && s_hat > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {s_hat}"
        )));
    }
    if weights.len() != set.len() {
        return Err(Error::Shape(format!(
            "{} correspondences but {} weights",
            set.len(),
            weights.len()
        )));
    }
    let src_centroid = weighted_centroid(set.src(), weights)?;
    let dst_centroid = weighted_centroid(set.dst(), weights)?;

    let mut acc = Matrix4::zeros();
    let mut constant = 0.0;
    for ((p, q), &w) in set.src().iter().zip(set.dst()).zip(weights) {
        if w == 0.0 {
            continue;
        }
        let pt = p - src_centroid;
        let qt = q - dst_centroid;
        let pi_q = pi_matrices(&homogenize(&qt)).pi1;
        let pi_p = pi_matrices(&homogenize(&pt)).pi2;
        acc += w * (pi_q.transpose() * pi_p);
        constant += w * (s_hat * s_hat * pt.norm_squared() + qt.norm_squared());
    }
    let c = -2.0 * s_hat * acc;
    Ok(QuadraticForm {
        matrix: 0.5 * (c + c.transpose()),
        constant,
        src_centroid,
        dst_centroid,
        scale: s_hat,
    })
}

/// Minimum eigenpair of `C`: the globally optimal quaternion and `f* = λ_min + D`.
pub fn solve_rotation(form: &QuadraticForm) -> Result<(UnitQuaternion, f64)> {
    if !form.matrix.iter().all(|v| v.is_finite()) || !form.constant.is_finite() {
        return Err(Error::NonFinite("quadratic form".into()));
    }
    let eig = SymmetricEigen::new(form.matrix);
    let k = eig.eigenvalues.imin();
    let lambda = eig.eigenvalues[k];
    let q = UnitQuaternion::normalize(eig.eigenvectors.column(k).into_owned())?;
    Ok((q, lambda + form.constant))
}

/// `t̂ = Q̄ − ŝ·R̂·P̄`.
pub fn recover_translation(
    rotation: &RotationMatrix,
    form: &QuadraticForm,
    s_hat: f64,
) -> Vector3<f64> {
    form.dst_centroid - s_hat * rotation.rotate(&form.src_centroid)
}

/// Certificate for a claimed optimum `f_star` at `q_hat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub f_hat: f64,
    pub duality_gap: f64,
    pub psd: bool,
    pub certified: bool,
}

/// Checks that `C − (f* − D)·I` is positive semidefinite (so `f*` is a valid
/// lower bound) and that the recovered solution attains it.
///
/// The PSD check is a Cholesky factorization, independent of the eigen
/// decomposition that produced `f*`.
pub fn certify_optimality(
    form: &QuadraticForm,
    q_hat: &UnitQuaternion,
    f_star: f64,
) -> Result<Certificate> {
    let tau = f_star - form.constant;
    let slack = PSD_TOL * form.matrix.amax().max(1.0);
    let shifted = form.matrix - Matrix4::from_diagonal_element(tau - slack);
    let psd = shifted.cholesky().is_some();

    let f_hat = form.evaluate(q_hat.as_vector());
    let diff = f_hat - f_star;
    let zero_tol = ZERO_OBJECTIVE_TOL * form.constant.max(1.0);
    let duality_gap = if f_hat.abs() <= zero_tol {
        if diff.abs() <= zero_tol {
            0.0
        } else {
            return Err(Error::UndefinedGap { f_hat, f_star });
        }
    } else {
        diff / f_hat
    };
    Ok(Certificate {
        f_hat,
        duality_gap,
        psd,
        certified: psd && duality_gap.abs() <= GAP_TOL,
    })
}

/// Builds, solves and certifies one weighted instance.
pub fn solve_weighted(
    set: &CorrespondenceSet,
    weights: &[f64],
    s_hat: f64,
) -> Result<SolveReport> {
    let form = build_quadratic_form(set, weights, s_hat)?;
    let (q_hat, f_star) = solve_rotation(&form)?;
    let rotation = q_hat.to_rotation();
    let translation = recover_translation(&rotation, &form, s_hat);
    let cert = certify_optimality(&form, &q_hat, f_star)?;
    Ok(SolveReport {
        q_hat,
        rotation,
        translation,
        f_star,
        f_hat: cert.f_hat,
        duality_gap: cert.duality_gap,
        certified: cert.certified,
    })
}
