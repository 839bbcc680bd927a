//! Balls, `(N, ell)`-packings, covers, greedy construction and the doubling probe.

mod ball;
mod cover;
mod doubling;
mod family;
mod greedy;
mod grid;

pub use ball::{unit_sphere_directions, Ball};
pub use cover::{build_cover, Cover};
pub use doubling::{doubling_probe, DoublingReport};
pub use family::{parse_packing, verify_packing, write_packing, PackingFamily, Verdict, Violation};
pub use greedy::{
    build_greedy_packing, candidate_step, greedy_pack_candidates, BallFunction, GreedyPacking, RadiusFn,
    CONSTRUCTION_MARGIN,
};
pub use grid::SpatialIndex;
