//! Semi-supervised streaming classification of power-system events.
//!
//! The crate is split along the processing chain:
//!
//! - [`data`]: instances, schemas, z-score normalization, labeled sampling and
//!   bad-data injection.
//! - [`omp`]: k-sparse encoding with Orthogonal Matching Pursuit.
//! - [`dictionary`]: alternating minimization with block-coordinate atom
//!   updates, and re-encoding of labeled instances.
//! - [`drift`]: ADWIN and DDM change detectors.
//! - [`tree`]: the Hoeffding adaptive tree classifier with global DDM
//!   supervision.
//! - [`eval`]: prequential evaluation, Kappa, fold averaging and synthetic
//!   streams.
//!
//! Everything here is `no_std` with `alloc`; file formats, timing and the
//! command line live in the companion `sshad` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod dictionary;
pub mod drift;
mod error;
pub mod eval;
pub mod omp;
pub mod seed;
pub mod tree;

pub use error::{Error, Result};
