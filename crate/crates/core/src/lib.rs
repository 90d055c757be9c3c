//! Smooth maps whose level sets are exactly the orbits of a finite reflection
//! group acting on Euclidean space.

pub mod calculus;
pub mod chamber;
pub mod cli;
pub mod config;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod polar;
pub mod smoothing;
pub mod verify;

pub use chamber::{classify, fold, strata_levels, Chamber, FoldResult, Stratification, StratumDescriptor};
pub use error::{Error, Result};
pub use groups::{generate_group, preset_group, GroupElement, Hyperplane, Preset, ReflectionGroup};
pub use linalg::Point;
