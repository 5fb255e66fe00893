//! Pinned physical constants (SI).
//!
//! Fixed to the 2019 SI definitions so that occupation numbers and photon
//! budgets are reproducible bit for bit.

/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant [J/K].
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;

/// 2π, for angular/ordinary frequency conversion `ω = 2πν`.
pub const TWO_PI: f64 = core::f64::consts::TAU;
