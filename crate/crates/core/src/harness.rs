//! Numerical experiments: angle measurement, test instances, bound reports
//! and homotopy path scans.

pub mod angles;
pub mod instance;
pub mod path;
pub mod verify;

pub use angles::{geometry_kind, measure_angles, AngleMeasurement, GeometryKind};
pub use instance::{
    derive_seed, random_instance, random_instance_with, sharp_example_2x2, GapSpec, Instance,
    Layout, PerturbationKind, SharpExample,
};
pub use path::{path_scan, PathPoint, PathScan, PathViolation, PathViolationKind};
pub use verify::{
    analyze_instance, verify_instance, Analysis, BoundCheck, BoundReport, CheckKind,
    VerifyOptions, Violation,
};
