//! Best approximation pairs between two disjoint closed convex sets: solvers,
//! uniqueness/existence certificates, and a grid-based verification oracle.

pub mod certificates;
pub mod corpus;
pub mod error;
pub mod problem;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod projections;
pub mod report;
pub mod runner;
pub mod sets;
pub mod solvers;

pub use error::{Error, Result};
