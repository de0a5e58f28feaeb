//! Simulation of a matter-wave gyroscope built from a superposition of two
//! counter-rotating vortex states in a trapped condensate.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! * [`stirap`] transfers the non-rotating condensate into the vortex
//!   superposition with an adiabatic Raman pulse sequence,
//! * [`interference`] renders the resulting fringe pattern and rotates it by
//!   the Sagnac phase `2 l Omega t`,
//! * [`imaging`] turns a density field into a shot-noise-limited photon-count
//!   image and evaluates signal-to-noise and sensitivity figures,
//! * [`readout`] demodulates the fringe phase from images and fits the
//!   rotation rate.
//!
//! [`condensate`] provides the Thomas–Fermi vortex modes the pattern is built
//! from; [`config`] and [`cli`] wire everything to the `vortex-gyro` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod condensate;
pub mod config;
pub mod error;
pub mod imaging;
pub mod interference;
mod ode;
pub mod readout;
pub mod stirap;

pub use condensate::{
    solve_chemical_potential, trap_potential, vortex_amplitude, ChemicalPotential,
    CondensateProfile, TrapConfig,
};
pub use error::{Error, Result};
pub use imaging::{effective_snr, sensitivity, snapshot, snr, FringeImage, ProbeConfig};
pub use interference::{
    density, pattern_rotation_angle, sagnac_phase, DensityField, Grid, RenderMode,
    VortexSuperposition,
};
pub use readout::{estimate_rotation_rate, extract_fringe_phase, PhaseEstimate, RateEstimate};
pub use stirap::{evolve_amplitudes, final_superposition, AmplitudeTrajectory, PulseSchedule};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054571817e-34;
