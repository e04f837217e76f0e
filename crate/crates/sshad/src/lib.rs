//! File formats, experiment pipeline and command line around `sshad-core`.
//!
//! The core crate holds the algorithms; this crate adds CSV/ARFF loading,
//! dictionary and model persistence, run manifests, wall-clock timing and
//! rayon-parallel batch encoding.

pub mod clock;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
pub mod persist;
pub mod pipeline;
pub mod report;

pub use sshad_core;

pub use config::{Mode, RunConfig, Seeds, Timing};
pub use error::{Error, Result, Stage};
pub use pipeline::{compare_runs, learn_dict, run, run_had_baseline, run_sshad, verify_manifest, Manifest};
