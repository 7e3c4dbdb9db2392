//! Photonic simulator of the Thirring model built from stationary-light
//! polaritons.
//!
//! The crate is layered bottom-up:
//!
//! * [`params`] maps optical control knobs onto effective field-theory
//!   couplings, masses, cutoffs and loss rates.
//! * [`atlas`] sweeps those maps over detuning grids.
//! * [`correlations`] evaluates the exact massless-Thirring correlators.
//! * [`dynamics`] integrates the mean-field polariton equations with a
//!   split-step spectral scheme.
//! * [`lattice`] exactly diagonalizes a discretized two-species Bose model to
//!   check fermionization and the optical detection identity.
//! * [`io`] holds scenario configuration, CSV/JSON serialization and the
//!   command implementations used by the `thirring` binary.

pub mod atlas;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lattice;
pub mod params;
pub mod units;

pub use error::{Error, Result};
pub use params::{OpticalConfig, PolaritonParams, Species};
