use rayon::prelude::*;
use sshad_core::dictionary::BatchEncoder;
use sshad_core::omp::{omp_encode, Dictionary, OmpConfig, SparseCode};

/// Encodes signals on the rayon pool. Each code is computed independently,
/// so the output equals sequential encoding exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl BatchEncoder for Parallel {
    fn encode(
        &self,
        signals: &[&[f64]],
        dict: &Dictionary,
        cfg: &OmpConfig,
    ) -> sshad_core::Result<Vec<SparseCode>> {
        let results: Vec<_> = signals.par_iter().map(|x| omp_encode(x, dict, cfg)).collect();
        // report the lowest failing index, as sequential encoding would
        results
            .into_iter()
            .enumerate()
            .map(|(index, r)| {
                r.map_err(|e| sshad_core::Error::AtInstance { index, source: Box::new(e) })
            })
            .collect()
    }
}
