//! Fixed-size 3D/4D geometry shared by the estimators.
//!
//! Quaternions use the scalar-last layout `(q1, q2, q3, q4)` with `q4` the
//! scalar part, which is also the layout the `Π` matrices are written in.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

const ROTATION_TOL: f64 = 1e-9;
const TRIAD_TOL: f64 = 1e-9;
const QUAT_NORM_TOL: f64 = 1e-6;

/// Paired source and destination points `(P_i, Q_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    src: Vec<Point3>,
    dst: Vec<Point3>,
}

impl CorrespondenceSet {
    /// Builds a set from equal-length, finite point lists.
    ///
    /// Minimum sizes are enforced by the estimators that need them, not here,
    /// so that files with very few rows can still be loaded and inspected.
    pub fn new(src: Vec<Point3>, dst: Vec<Point3>) -> Result<Self> {
        if src.len() != dst.len() {
            return Err(Error::Shape(format!(
                "{} source points but {} destination points",
                src.len(),
                dst.len()
            )));
        }
        if let Some(i) = src
            .iter()
            .zip(&dst)
            .position(|(p, q)| !is_finite(p) || !is_finite(q))
        {
            return Err(Error::NonFinite(format!("correspondence {i}")));
        }
        Ok(Self { src, dst })
    }

    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn src(&self) -> &[Point3] {
        &self.src
    }

    pub fn dst(&self) -> &[Point3] {
        &self.dst
    }

    pub fn pair(&self, i: usize) -> (Point3, Point3) {
        (self.src[i], self.dst[i])
    }

    /// The correspondences at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> CorrespondenceSet {
        CorrespondenceSet {
            src: indices.iter().map(|&i| self.src[i]).collect(),
            dst: indices.iter().map(|&i| self.dst[i]).collect(),
        }
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            Err(Error::Precondition(format!(
                "need at least {min} correspondences, got {}",
                self.len()
            )))
        } else {
            Ok(())
        }
    }
}

fn is_finite(p: &Point3) -> bool {
    p.iter().all(|c| c.is_finite())
}

/// A proper rotation, `RᵀR = I` and `det R = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates orthonormality and orientation to within `1e-9` per entry.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("rotation matrix".into()));
        }
        let defect = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "not a rotation: orthogonality defect {defect:e}, det {det}"
            )));
        }
        Ok(Self(m))
    }

    /// Rotation by `angle` radians about the z axis.
    pub fn about_z(angle: f64) -> Self {
        exp_map_so3(&Vector3::new(0.0, 0.0, angle))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn rotate(&self, p: &Point3) -> Point3 {
        self.0 * p
    }

    /// Largest absolute entry of `RᵀR − I`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn to_quaternion(&self) -> UnitQuaternion {
        rot_to_quat(self)
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul<Point3> for &RotationMatrix {
    type Output = Point3;

    fn mul(self, rhs: Point3) -> Point3 {
        self.0 * rhs
    }
}

/// Unit quaternion in scalar-last layout, canonicalized to `q4 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Vector4<f64>);

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self(Vector4::new(0.0, 0.0, 0.0, 1.0))
    }

    /// Accepts inputs whose norm is within `1e-6` of one and renormalizes.
    pub fn new(q1: f64, q2: f64, q3: f64, q4: f64) -> Result<Self> {
        Self::from_vector(Vector4::new(q1, q2, q3, q4))
    }

    pub fn from_vector(v: Vector4<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > QUAT_NORM_TOL {
            return Err(Error::Normalization { norm });
        }
        Ok(Self(v / norm).canonical())
    }

    /// Normalizes any nonzero finite 4-vector.
    pub fn normalize(v: Vector4<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Normalization { norm });
        }
        Ok(Self(v / norm).canonical())
    }

    /// Representative of `±q` with `q4 ≥ 0`; when `q4 = 0` the first nonzero
    /// component is made positive.
    fn canonical(self) -> Self {
        let v = self.0;
        let flip = if v[3] != 0.0 {
            v[3] < 0.0
        } else {
            v.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0)
        };
        if flip {
            Self(-v)
        } else {
            self
        }
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    /// Scalar part `q4`.
    pub fn scalar(&self) -> f64 {
        self.0[3]
    }

    pub fn to_rotation(&self) -> RotationMatrix {
        quat_to_rot(self)
    }
}

/// Rotation matrix of a unit quaternion.
pub fn quat_to_rot(q: &UnitQuaternion) -> RotationMatrix {
    let [x, y, z, w] = [q.0[0], q.0[1], q.0[2], q.0[3]];
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let (xy, xz, yz) = (x * y, x * z, y * z);
    let (xw, yw, zw) = (x * w, y * w, z * w);
    RotationMatrix(Matrix3::new(
        1.0 - 2.0 * (yy + zz),
        2.0 * (xy - zw),
        2.0 * (xz + yw),
        2.0 * (xy + zw),
        1.0 - 2.0 * (xx + zz),
        2.0 * (yz - xw),
        2.0 * (xz - yw),
        2.0 * (yz + xw),
        1.0 - 2.0 * (xx + yy),
    ))
}

/// Quaternion of a rotation matrix (Shepperd's branch on the largest pivot).
pub fn rot_to_quat(r: &RotationMatrix) -> UnitQuaternion {
    let m = &r.0;
    let trace = m.trace();
    let pivots = [trace, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let (k, _) = pivots
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        });
    let v = match k {
        0 => {
            let s = 2.0 * (1.0 + trace).sqrt();
            Vector4::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
                0.25 * s,
            )
        }
        1 => {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            Vector4::new(
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(2, 1)] - m[(1, 2)]) / s,
            )
        }
        2 => {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            Vector4::new(
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
            )
        }
        _ => {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            Vector4::new(
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        }
    };
    UnitQuaternion(v / v.norm()).canonical()
}

/// The pair `(Π1(v), Π2(v))` of 4×4 matrices linear in `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiPair {
    pub pi1: Matrix4<f64>,
    pub pi2: Matrix4<f64>,
}

/// Builds `Π1(v)` and `Π2(v)`.
///
/// For a unit quaternion `q` and a point `p`, `Π2(q)ᵀ Π1(q) [p; 0] = [R(q) p; 0]`,
/// and for any `v, w` the products satisfy `Π1(v) w = Π2(w) v`.
pub fn pi_matrices(v: &Vector4<f64>) -> PiPair {
    let [a, b, c, d] = [v[0], v[1], v[2], v[3]];
    #[rustfmt::skip]
    let pi1 = Matrix4::new(
         d, -c,  b,  a,
         c,  d, -a,  b,
        -b,  a,  d,  c,
        -a, -b, -c,  d,
    );
    #[rustfmt::skip]
    let pi2 = Matrix4::new(
         d,  c, -b,  a,
        -c,  d,  a,  b,
         b, -a,  d,  c,
        -a, -b, -c,  d,
    );
    PiPair { pi1, pi2 }
}

/// Homogenizes a point as the pure quaternion `[p; 0]`.
pub fn homogenize(p: &Point3) -> Vector4<f64> {
    Vector4::new(p.x, p.y, p.z, 0.0)
}

/// Angle of `R1ᵀR2` in radians, in `[0, π]`.
///
/// Equal to `arccos((trace − 1)/2)`; evaluated as an `atan2` of the sine
/// (from the skew part) and the clamped cosine so that small angles keep
/// full precision.
pub fn geodesic_error(r1: &RotationMatrix, r2: &RotationMatrix) -> f64 {
    let m = r1.0.transpose() * r2.0;
    let cos = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let axis = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    let sin = (axis.norm() / 2.0).min(1.0);
    sin.atan2(cos)
}

fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Exponential map from an axis-angle vector to SO(3) (Rodrigues).
pub fn exp_map_so3(omega: &Vector3<f64>) -> RotationMatrix {
    let theta = omega.norm();
    let k = skew(omega);
    let m = if theta < 1e-12 {
        Matrix3::identity() + k + 0.5 * k * k
    } else {
        let (s, c) = theta.sin_cos();
        Matrix3::identity() + (s / theta) * k + ((1.0 - c) / (theta * theta)) * k * k
    };
    RotationMatrix(m)
}

/// Scale, rotation and translation applied as `s·R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: RotationMatrix,
    pub translation: Vector3<f64>,
}

impl SimilarityTransform {
    pub fn new(scale: f64, rotation: RotationMatrix, translation: Vector3<f64>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("translation".into()));
        }
        Ok(Self {
            scale,
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: RotationMatrix::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        self.scale * self.rotation.rotate(p) + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let inv_scale = 1.0 / self.scale;
        Self {
            scale: inv_scale,
            rotation: rt,
            translation: -inv_scale * rt.rotate(&self.translation),
        }
    }
}

/// Applies `T` to every point of `cloud`.
pub fn apply_transform(t: &SimilarityTransform, cloud: &[Point3]) -> Vec<Point3> {
    cloud.iter().map(|p| t.apply(p)).collect()
}

/// Weighted centroid `Σωᵢpᵢ / Σωᵢ` and the points with it subtracted.
pub fn weighted_centroid_demean(
    points: &[Point3],
    weights: &[f64],
) -> Result<(Point3, Vec<Point3>)> {
    let centroid = weighted_centroid(points, weights)?;
    Ok((centroid, points.iter().map(|p| p - centroid).collect()))
}

pub(crate) fn weighted_centroid(points: &[Point3], weights: &[f64]) -> Result<Point3> {
    if points.len() != weights.len() {
        return Err(Error::Shape(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    let sum = points
        .iter()
        .zip(weights)
        .fold(Vector3::zeros(), |acc, (p, w)| acc + *w * p);
    Ok(sum / total)
}

/// Rotation taking the triad spanned by `src` onto the one spanned by `dst`.
///
/// Builds `m1 = (P2−P1)/‖·‖`, `m2 = m1 × (P3−P1)/‖·‖` (normalized) and
/// `m3 = m1 × m2`, likewise `n1..n3` from `dst`, and returns `[n][m]ᵀ`.
/// The result is invariant to any scale and translation relating the triples.
pub fn triad_rotation(src: &[Point3; 3], dst: &[Point3; 3]) -> Result<RotationMatrix> {
    let m = triad_frame(src)?;
    let n = triad_frame(dst)?;
    Ok(RotationMatrix(n * m.transpose()))
}

fn triad_frame(p: &[Point3; 3]) -> Result<Matrix3<f64>> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let (l1, l2) = (e1.norm(), e2.norm());
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::DegenerateTriad);
    }
    let m1 = e1 / l1;
    let cross = m1.cross(&(e2 / l2));
    let c = cross.norm();
    if !(c >= TRIAD_TOL) {
        return Err(Error::DegenerateTriad);
    }
    let m2 = cross / c;
    let m3 = m1.cross(&m2);
    Ok(Matrix3::from_columns(&[m1, m2, m3]))
}
