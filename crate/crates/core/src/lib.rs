//! Solitary traveling waves of four nonlinear wave equations, written in
//! action–angle form.
//!
//! The crate covers the Korteweg–de Vries soliton, the sine-Gordon kink, the
//! Fisher–KPP front and the viscous Burgers shock. For each of them it
//!
//! * evaluates the closed-form profile `u(z)`, `z = x - v t` ([`models`]),
//! * reduces the PDE to a phase-plane ODE and traces its separatrix
//!   ([`reduction`]),
//! * computes the action `I = (1/2π) ∫ (du/dz)² dz` numerically and in closed
//!   form, together with the linear angle flow `dΘ/dz = v` ([`action`]),
//! * evolves the full PDE from the profile and checks that the wave moves
//!   rigidly at `v` while `I` stays constant ([`pde`]).
//!
//! Everything here is pure computation on `alloc` collections; file formats
//! and the command line live in the `travelwave` companion crate.
#![no_std]
// Modules import `num_traits::Float` for libm-backed float methods. Once std
// is linked anywhere in the build (tests, the CLI) its inherent methods take
// precedence and those imports go unused, hence the local allows.

extern crate alloc;

pub mod action;
pub mod defaults;
mod error;
pub mod models;
pub mod pde;
pub mod reduction;

pub use error::{Error, Result};
pub use models::{Branch, ModelKind, ModelSpec, RawParams, SpeedRequest, TravelingWave};
