//! The discretised maximal operators `M^delta` and `M^{delta,*}`, their
//! norms, the multiplicity functional and the focusing example.

pub mod field;
pub mod focusing;
pub mod multiplicity;
pub mod operator;

pub use field::{ScalarField, VoxelGrid};
pub use focusing::{focusing_probe, focusing_ratio, predicted_focusing_growth, FocusingPoint, FocusingProbe};
pub use multiplicity::{multiplicity_functional, surjections, tuple_sum_bruteforce, MultiplicityEstimate};
pub use operator::{
    eval_max, full_max_norm, lp_norm, region_average, sliced_max_norm, sliced_max_norm_shifted, weighted_lp_norm,
    Average, GridNorm, MaxEstimate, MaxProbeConfig, MaxVariant, DEFAULT_AVERAGE_SAMPLES,
};
