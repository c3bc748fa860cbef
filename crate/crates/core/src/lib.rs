//! Simulation and estimation toolkit for quantum-state overlap measurements
//! on a programmable 10-mode linear-optical processor.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! - [`matrix`], [`permanent`], [`fock`]: complex linear algebra, Ryser
//!   permanents and Fock-state evolution under linear optics, with a
//!   brute-force second-quantised oracle for cross-validation.
//! - [`mesh`], [`circuit`]: Mach-Zehnder transfer matrices, Bell-scheme mesh
//!   composition and the two-qudit overlap-estimation circuit.
//! - [`crosstalk`], [`calib`]: the thermal-crosstalk noise model and simulated
//!   calibration sweeps (single-MZI and meta-MZI).
//! - [`estimator`]: exact overlaps, the parity / coincidence estimators with
//!   bunching correction, and sample-complexity calculators.
//! - [`cv`]: continuous-variable characteristic functions and phase-space
//!   Monte-Carlo overlap estimation over energy-bounded hyperspheres.
//! - [`dataset`], [`kernel`], [`svm`]: quantum-kernel SVM classification.
//! - [`spsa`]: online learning of an unknown qudit by simultaneous
//!   perturbation stochastic approximation.
//!
//! All operations are pure functions of their inputs; randomised routines
//! take explicit seeds and are deterministic. The crate is `no_std`
//! compatible (`alloc` required) when built with the `libm` feature.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("overlap-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod calib;
pub mod circuit;
pub mod crosstalk;
pub mod cv;
pub mod dataset;
pub mod error;
pub mod estimator;
pub mod fock;
pub mod kernel;
pub mod matrix;
pub mod mesh;
pub mod permanent;
pub mod qudit;
pub mod seed;
pub mod spsa;
pub mod svm;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, UnitaryMatrix};
