//! Discretised spherical maximal operators: annuli, polar caps, tuple
//! intersections and the experiments that measure their volume exponents.

// `!(x > 0.0)` rejects NaN as well; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod configurations;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod geometry;
pub mod linalg;
pub mod maximal;
pub mod measure;
pub mod rng;
pub mod volume;

pub use error::{Error, Result};
pub use geometry::{AxisBox, Region, RegionKind, Slab, Sphere};
pub use volume::{VolumeEstimate, VolumeMethod};
