//! Computational toolkit for the cone of non-negative operator convex
//! functions on (0, ∞), its facial structure, and matrix-level checks.

pub mod cli;
pub mod closed_set;
pub mod decompose;
pub mod error;
pub mod faces;
pub mod interval;
pub mod matcalc;
pub mod measure;
pub mod ocfun;
pub mod param;
pub mod recover;
mod roots;
pub mod specfile;

pub use closed_set::ClosedSet;
pub use error::{Error, Result};
pub use measure::{FiniteMeasure, Segment};
pub use ocfun::{BoundaryData, ExtremeRay, OcFunction, ReanchoredData};
pub use param::ExtendedParam;
