//! Computable constructions on power sets of ℝ^d: exact box-set algebra,
//! set-valued maps with selection witnesses, lower-semicontinuity checks,
//! measure evaluation, path and adherence-set derivatives, Fomin
//! derivatives of measures, and Eulerian shape derivatives.

pub mod error;
pub mod expr;
pub mod measure;
pub mod setrep;
pub mod scenarios;
pub mod shape;
pub mod svdiff;
pub mod svmap;

pub use error::{Error, Result};
pub use setrep::{AxisBox, Interval, RegionSet, SampledSet};
