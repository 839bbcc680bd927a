//! Packing pre-measures, packing dimension estimates and analytic bounds.

mod bounds;
mod fit;
mod premeasure;

pub use bounds::{analytic_bound, section_packing_constant, vertical_packing_constant, AnalyticBound};
pub use fit::{loglog_fit, LogLogFit, Sweep, R2_THRESHOLD, VALUE_FLOOR};
pub use premeasure::{
    covering_value, dimension_estimate, packing_premeasure_est, scaling_sweep, BallGauge, PackingParams, ScalePoint,
    ScalingReport,
};
