//! Flat profile, tube radii, tube maps and the smooth invariant map.

pub mod chain;
pub mod profile;
pub mod tubes;

pub use chain::{softmin, SmoothChain, TubeCoords, TubeHit};
pub use profile::{eval_h, Jet, SmoothProfile};
pub use tubes::{validate_tubes, TubeReport, TubeSpec};
