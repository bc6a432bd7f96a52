//! KdV solutions grown by Picard iteration, their two-point densities, and
//! reconstruction of the free energy tower.

mod boundary;
mod constraints;
mod evolve;
mod flows;
mod pipeline;
mod pole;
mod reconstruct;

pub use boundary::{bernoulli, boundary_coefficient, boundary_value, log_minus_half_x};
pub use constraints::{reduced_ring, require_zero, ConstraintSet, EulerTerm, LinearConstraint};
pub use evolve::{evolve, two_point_density, InitialData, Provenance};
pub use flows::FlowTable;
pub use pipeline::{gbgw_solution, gbgw_tower, wk_solution, GbgwLayout, WkLayout};
pub use pole::pole_to_power;
pub use reconstruct::{
    check_tower, genus0_crosscheck, reconstruct_gbgw, reconstruct_wk, FreeEnergyTower,
    KdvSolution,
};

#[cfg(test)]
mod tests;
