//! Casimir-Polder level shifts, forces, decay-rate corrections, levitation
//! equilibria and repulsion thresholds for a point particle carrying an
//! electric-dipole transition and a large spin S above a planar surface.
//!
//! Everything is computed in dimensionless units: shifts in ħΓ₀, forces in
//! ħΓ₀k_e, distances z̃ = k_e z₀, frequencies in ω_e. See [`params`].

pub mod materials;
pub mod params;
pub mod quadrature;
pub mod potentials;
pub mod asymptotics;
pub mod mechanics;
pub mod job;
