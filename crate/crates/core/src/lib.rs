//! Exact tools for marginal cones and marginal semigroups of hierarchical
//! table models, with a certified normality classifier for binary graph
//! models.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: complexes, shapes, tables, the marginal map and the
//!   full/reduced coordinate change.
//! * [`graph`]: graphs, minor operations, `K_4`-minor recognition, chordal
//!   completion and reducible decompositions.
//! * [`polyhedra`]: inequality systems, cycle inequalities, exact cone
//!   membership and facet certification.
//! * [`normality`]: integer feasibility, lattice-point and hole enumeration,
//!   and certificates.
//! * [`json`]: input parsing and exact JSON output.

pub mod error;
pub mod graph;
pub mod json;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod normality;
pub mod polyhedra;

pub use error::{Error, Result};
pub use num;
