//! Euclidean spaces and Heisenberg groups as computable Carnot groups.

mod group;
mod hom;
pub(crate) mod linalg;
mod region;

pub use group::{distance, make_euclidean, make_heisenberg, GroupKind, GroupSpec, Pt, KORANYI_KAPPA};
pub use hom::{HomHom, KernelVector};
pub use region::Region;
