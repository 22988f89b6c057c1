//! Rough mereology toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`dataset`]: information and decision systems, CSV ingestion,
//!   discretization and the discernibility primitives.
//! - [`mereology`]: the finite set model of mereology with weights and
//!   the mereological implication.
//! - [`inclusion`]: rough inclusions (weight ratio, t-norm residua,
//!   Archimedean forms, information-system and exponential inclusions).
//! - [`granulation`]: granules, irreducible coverings, granular
//!   reflections and the cross-validated granular decider.
//! - [`logic`]: descriptor formulas and their graded semantics on granules.
//! - [`synthesis`]: layered networks of granular agents.
//! - [`geometry`]: rectangle mereogeometry, formations and navigation.

pub mod dataset;
pub mod geometry;
pub mod granulation;
pub mod inclusion;
pub mod logic;
pub mod mereology;
pub mod objset;
pub mod synthesis;

pub use dataset::{DecisionSystem, InformationSystem};
pub use objset::ObjectSet;

/// Tolerance used for every floating point degree comparison.
pub const DEGREE_TOL: f64 = 1e-9;
