//! Mean-field spectral functions for photons and phonons propagating in a
//! one-dimensional nanoscale waveguide.
//!
//! Photons on the lowest guided branch (linear dispersion `ω_k = ω₀ + v_g k`)
//! couple to acoustic and vibrational phonon branches through a Brillouin
//! three-wave interaction. Under the mean-field factorization the retarded
//! Green's functions close, and each mode acquires a complex self-energy
//! `M(ω) = Δ(ω) − iΛ(ω)/2`: a frequency renormalization `Δ` plus an
//! interaction-induced damping `Λ` on top of the phenomenological rates.
//! The observable lineshape is the spectral function
//! `S(ω) = −2 Im G(ω)`.
//!
//! The crate provides two independent evaluation routes:
//!
//! * [`selfenergy`] / [`spectral`] — closed-form channel sums in frequency
//!   space (sums of complex poles over the discrete mode grid `k = 2πn/L`),
//! * [`oracle`] — direct time-domain integration of the factorized
//!   equations of motion followed by a Fourier transform.
//!
//! Both routes must agree; the test suite enforces this.
//!
//! All frequencies, rates and couplings are angular quantities in rad/s.
//! The crate is `no_std` (with `alloc`); IO, configuration files and the
//! command line front end live in the companion `wgspec-cli` crate.

#![no_std]
// validation predicates use `!(x > 0.0)` so that NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod constants;
pub mod dispersion;
mod error;
mod math;
pub mod model;
pub mod occupation;
pub mod oracle;
pub mod selfenergy;
pub mod spectral;

pub use error::{Error, Result};
pub use model::Warnings;
