//! Numerical workbench for quantum phase dynamics in natural units (ħ = 1).
//!
//! The crate is organized around five subsystems:
//!
//! * [`field`] — pulsed driving fields (envelope, carrier, carrier-envelope
//!   phase, polynomial phase modulation) and additive phase ledgers.
//! * [`twolevel`] — lab-frame integration of the time dependent Schrödinger
//!   equation for a damped two-level system, with analytic Rabi/Ramsey/decay
//!   oracles and unwrapped amplitude phases.
//! * [`dressed`] — instantaneous dressed states of the rotating-frame
//!   Hamiltonian, branch-tracked eigenvalues, and the component-phase
//!   accumulators for the real/virtual dressed components.
//! * [`hydro`] — 1D spectral wavefunction propagation, the polar
//!   (amplitude/action) decomposition, Hamilton-Jacobi and continuity
//!   residuals, and Bohmian trajectory ensembles.
//! * [`experiments`] — scripted virtual experiments (Ramsey scans, harmonic
//!   wave-packet interferograms, free double slit) reduced to fringe data
//!   plus a fitted fringe phase.
//!
//! All phases are stored unwrapped on the real line; wrapping to (-π, π] is
//! presentation only. The crate is `no_std` (with `alloc`) so the numerical
//! engine carries no IO; file formats and the CLI live in the companion
//! `phaselab` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dressed;
pub mod experiments;
pub mod field;
pub mod hydro;
pub mod numerics;
pub mod twolevel;

pub use num_complex::Complex64;
