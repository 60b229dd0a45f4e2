//! Local virtual-element machinery: generator layouts, trace evaluation,
//! projectors, and the local forms they feed.

pub mod layout;
pub mod local;
pub mod projectors;
pub mod trace;

#[cfg(test)]
mod tests;

pub use layout::{build_layout, ElementClass, GeneratorLayout, Slot};
pub use local::{local_load, local_robin, local_stiffness, trace_value, LocalSystem};
pub use projectors::LocalOperators;
pub use trace::{AffineValue, BoundaryData, EdgeTrace};
