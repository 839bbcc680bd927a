//! Numerical laboratory for packing pre-measures, packing dimensions and map
//! energies on Carnot groups (Euclidean spaces and Heisenberg groups).
//!
//! All geometry is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`, which is what the experiment
//! runner uses.

pub mod carnot;
pub mod config;
pub mod energy;
pub mod error;
pub mod measures;
pub mod output;
pub mod packing;
pub mod runner;
pub mod scalar;
pub mod suite;
pub mod theorems;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = carnot::Pt<f64>;
pub type Region64 = carnot::Region<f64>;
