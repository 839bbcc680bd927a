//! Image measures and energies of maps on Carnot groups.

mod estimate;
mod image;
mod jacobian;
mod map;

pub use estimate::{
    energy_dimension_probe, energy_estimate, zero_crossing, EnergyDimensionReport, EnergyReport, DEFAULT_RESOLUTION,
};
pub use image::{
    closed_form_unit, heisenberg_unit_ball_volume, quotient_unit_area, raster_measure, ImageMeasurer, MeasureMethod,
    CELLS_PER_AXIS, CELL_BUDGET, MIN_RESOLUTION,
};
pub use jacobian::{jacobian_j, pej_check, unit_gauge_ball_volume};
pub use map::{MapKind, MapSpec};
