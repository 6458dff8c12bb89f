//! Robust correspondence-based point cloud registration.
//!
//! The pipeline decouples a similarity registration `s·R·P + t ≈ Q` into
//! three stages:
//!
//! 1. [`ransic`]: random 3-point samples filtered by scale, translation and
//!    rotation invariants, yielding a scale estimate and a handful of inliers.
//! 2. [`solver`]: a weighted, translation-free quaternion formulation whose
//!    global minimum is a minimum eigenpair, shipped with an optimality
//!    certificate and duality gap.
//! 3. [`gnc`]: graduated non-convexity with the Leclerc cost and rough
//!    trimming, seeded with the inliers found in stage 1.
//!
//! [`pipeline::iron`] composes them. [`synth`], [`metrics`], [`baseline`],
//! [`bench`] and [`io`] provide the evaluation harness used by the `iron` CLI.

pub mod baseline;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod gnc;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod ransic;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    CorrespondenceSet, Point3, RotationMatrix, SimilarityTransform, UnitQuaternion,
};
pub use pipeline::{iron, IronConfig, RegistrationResult, ScaleMode};
