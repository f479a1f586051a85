//! Splitting types of vector bundles on the projective line: realizability of
//! short exact sequences, explicit certifying matrices, components of the
//! locally free Quot locus, and the codimension-2 Boij–Söderberg layer.

pub mod balancing;
pub mod betti;
pub mod error;
pub mod guard;
pub mod matrixgen;
pub mod oracle;
pub mod quot_geometry;
pub mod realizability;
pub mod splitting;
pub mod stable_pairs;

pub use error::{Error, Result};
pub use realizability::Triple;
pub use splitting::{st, SplittingType};
