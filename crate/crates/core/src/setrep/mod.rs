//! Exact finite unions of axis-aligned boxes in ℝ^d and their Boolean algebra.

mod interval;
pub mod json;
mod region;
mod sampled;

pub use interval::{AxisBox, Interval};
pub use region::RegionSet;
pub use sampled::{directed_hausdorff, hausdorff, SampledSet};
