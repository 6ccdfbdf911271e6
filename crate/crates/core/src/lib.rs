//! Exact verification of Kannan-type contractive conditions.
//!
//! All arithmetic is over exact rationals ([`Scalar`]); strict inequalities
//! are decided exactly, square roots included. The crate provides
//!
//! * metric spaces, finite and closed-form ([`space`]),
//! * self-maps and orbits ([`map`]),
//! * a catalog of contractive conditions with an exact pair checker
//!   ([`condition`]),
//! * Picard iteration with proof-level diagnostics ([`picard`]),
//! * fixed-point-free strict Kannan constructions ([`completeness`]),
//! * a brute-force census of all self-maps of small finite spaces ([`oracle`]),
//! * the end-to-end example gallery ([`gallery`]).

#![allow(clippy::needless_range_loop)]

pub mod completeness;
pub mod condition;
pub mod error;
pub mod gallery;
pub mod map;
pub mod oracle;
pub mod picard;
pub mod scalar;
pub mod space;

pub use condition::{
    check_epsdelta_orbit, evaluate_condition, evaluate_condition_with, ConditionKind, ConditionReport,
    PairSource, Parallelism, Verdict,
};
pub use error::{Error, Result};
pub use map::{orbit, orbit_cluster_probe, Orbit, OrbitStatus, SelfMap};
pub use picard::{run_picard, uniqueness_probe, verify_fixed_point, PicardRun};
pub use scalar::{compare, lt_sqrt, q, Scalar};
pub use space::{verify_metric_axioms, Point, Space};
pub use gallery::{run_gallery, GalleryOptions, GalleryReport};
