//! Change detectors used by the adaptive tree.

mod adwin;
mod ddm;

pub use adwin::{Adwin, Bucket, DEFAULT_DELTA, DEFAULT_MAX_BUCKETS, MIN_SUBWINDOW};
pub use ddm::{Ddm, DdmLevel, DDM_MIN_INSTANCES};
