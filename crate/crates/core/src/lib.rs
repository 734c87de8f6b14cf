//! Numerical geometry of the saddle sweepout family in the unit ball.

pub mod family_core;
pub mod quadrature;
pub mod surface_mesh;
pub mod topology_checks;
pub mod variation;
pub mod verifiers;
