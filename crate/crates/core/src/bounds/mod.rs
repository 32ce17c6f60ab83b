//! Error bounds for Lanczos-FA and the Lanczos quadratic form.

pub mod constants;
pub mod curve;
pub mod integral;

pub use constants::{
    bound_disk, bound_xq_relative, disk_integral, length_times_max, pacman_gamma_ratio, rational_discretization_report,
    sqrt_pacman_constant, piecewise_constant, uniform_poly_bound, PiecewiseKind, RationalDiscretization,
};
pub use curve::{
    bound_curve, bound_curve_with, quadform_curve, BoundConfig, BoundMetadata, BoundReport, BoundRow, ErrSource,
    QuadformReport, QuadformRow, SetsPolicy,
};
pub use integral::{
    bound_quadform, check_enclosure, fp_correction, integral_term, quadform_integral_term, IntegralValue, SpectrumSets,
};
