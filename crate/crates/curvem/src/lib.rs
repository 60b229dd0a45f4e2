//! Conforming virtual element method on 2-D polygonal meshes whose
//! elements may have one curved edge given in parametric form.
//!
//! Solves -div(kappa grad u) = f with Dirichlet and Robin boundary
//! conditions, supports curved material interfaces with one-sided
//! stabilization of the shared trace generator slots, and ships the
//! patch-test / convergence harnesses used by the acceptance suite.

pub mod assembly;
pub mod element;
pub mod error;
pub mod geometry;
pub mod io;
pub mod meshgen;
pub mod poly2d;
pub mod post;
pub mod problem;
pub mod solver;

pub use error::{Error, Result};
