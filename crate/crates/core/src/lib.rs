//! Creutz ladder and two-boson Creutz-Hubbard ladder.
//!
//! The library builds every Hamiltonian of the model family (single particle,
//! two-boson Fock space, effective doublon model, quasi-2D first-quantized
//! lattice), computes band topology (winding number, Zak phase via a Wilson
//! loop, phase classification) and runs exact eigendecomposition dynamics with
//! the observables used to diagnose Aharonov-Bohm caging, edge localization and
//! doublon binding.
//!
//! All numerical code is generic over the real scalar [`Real`] (`f32` or
//! `f64`); the aliases below fix it to `f64`, which is what the tolerances in
//! the test-suite assume.

// `!(x > y)` is used deliberately so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod hubbard;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod mapping2d;
pub mod scalar;
pub mod states;
pub mod topology;

pub use error::{Error, Result};
pub use lattice::{Boundary, Leg, SiteIndex};
pub use scalar::Real;

/// Complex amplitude over `f64`.
pub type C64 = nalgebra::Complex<f64>;

pub type LatticeParams = lattice::LatticeParams<f64>;
pub type BlochPoint = lattice::BlochPoint<f64>;
pub type HermitianMatrix = linalg::CMatrix<f64>;
pub type Amplitudes = linalg::CVector<f64>;
pub type Spectrum = linalg::Spectrum<f64>;
pub type PhaseClassification = topology::PhaseClassification<f64>;
pub type StateVector = states::StateVector<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type EdgeProfile = dynamics::EdgeProfile<f64>;
pub type FockState = hubbard::FockState<f64>;
pub type FirstQuantState = hubbard::FirstQuantState<f64>;
pub type EffectiveDoublonParams = effective::EffectiveDoublonParams<f64>;
pub type FidelitySeries = effective::FidelitySeries<f64>;
pub type Trajectory2d = mapping2d::Trajectory2d<f64>;
