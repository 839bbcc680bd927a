//! Executable checks of the inequalities relating packing pre-measures,
//! energies and maps.

mod coarea;
mod exponent;
mod holder;
mod modulus;
mod qc;
mod qs;
mod report;

pub use coarea::coarea_check;
pub use holder::{
    empirical_holder, euclidean_vertical_axis, holder_covariance_check, validate_holder, CoordinateIdentity, HolderFit,
};
pub use modulus::{
    admissibility_check, covering_packing, modulus_lower_bound, modulus_tau, SegmentFamily, TauReport,
};
pub use exponent::{exponent_bound, group_exponent_bound, pinching_bound, Rational};
pub use qc::{qc_submersion_check, QcReport};
pub use qs::{empirical_eta, qs_transport, Eta, QsMap, QsReport};
pub use report::{leq, InequalityReport, ScaleRow};
