//! Quantal time delay for solvable scattering models.
//!
//! The crate builds partial-wave S-matrices for a square well, a
//! delta-shell barrier and an exponential potential step, locates their
//! complex-energy poles, reconstructs the time delay as a sum of
//! Breit–Wigner profiles, and evaluates the energy integral of the delay,
//! whose value divided by `πħ` counts the resonances below the cutoff.
//!
//! Units throughout are `2m = ħ = 1` unless a module says otherwise.

pub mod counting;
pub mod numerics;
pub mod phasedata;
pub mod poles;
pub mod reflect;
pub mod scattering;
