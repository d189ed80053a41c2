mod bounds;
mod fit;

pub use bounds::{
    kernel_rate_factor, rate_constant_unweighted, rate_constant_weighted, stability_bound_check,
    stability_constants, trajectory_sup_error, trajectory_sup_relative_error, transfer_bound,
    transferability_gap_check, BoundCheck, BoundInputs, DEFAULT_EPSILON, DEGENERATE_NORM,
};
pub use fit::{fit_rate, least_squares, LineFit};
