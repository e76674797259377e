//! Symbolic verification engine for the group classification of coupled
//! reaction-diffusion systems `U_t - A ΔU = f(U)` with rotation-type
//! diffusion matrix `A = ((a, -1), (1, a))` (generalized complex
//! Ginzburg-Landau equations).
//!
//! The crate provides:
//!
//! * an exact symbolic expression engine over jet variables ([`expr`]),
//! * the PDE model and its residual on jet data ([`pde`]),
//! * vector fields, second-order prolongation and the full invariance
//!   oracle together with the reduced classifying-equation route
//!   ([`generator`], [`prolong`], [`classify`]),
//! * Lie-algebra machinery: commutators, closure checking and the
//!   canonicalization/enumeration of symmetry tails ([`lie`], [`tails`]),
//! * a machine-readable catalog of the classified nonlinearities with
//!   per-entry verification ([`catalog`]),
//! * equivalence transformations and their validity checks ([`equiv`]),
//! * a finite-difference harness that transports numerical solutions along
//!   group flows and measures the discrete residual ([`numeric`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion CLI
//! crate carries IO, file formats and orchestration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod expr;
pub mod pde;
pub mod generator;
pub mod prolong;
pub mod classify;
pub mod tails;
pub mod lie;
pub mod catalog;
pub mod equiv;
pub mod numeric;
pub mod report;

mod fmath;
mod rng;

pub use expr::{Expr, ExprError, Verdict};
