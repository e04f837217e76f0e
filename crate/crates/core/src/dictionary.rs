//! Dictionary learning by alternating minimization.
//!
//! Each outer iteration encodes the whole unlabeled batch with OMP against
//! the current dictionary, accumulates `A = sum a a^T` and `B = sum x a^T`,
//! and then sweeps the atoms in order with the block-coordinate update
//!
//! ```text
//! u_j = (b_j - D a_j) / A_jj + d_j
//! d_j = u_j / max(||u_j||, 1)
//! ```
//!
//! which is the exact minimizer of the quadratic objective over the unit
//! ball for atom `j` with all other atoms fixed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::data::Instance;
use crate::omp::{self, axpy, dot, norm2, Dictionary, OmpConfig, SparseCode};
use crate::{seed, Error, Result};

/// Atoms whose code energy `A_jj` is below this are not updated.
pub const UNUSED_ATOM_ENERGY: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DictLearnConfig {
    pub atoms: usize,
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub bcd_sweeps: usize,
    pub convergence_eps: f64,
    /// Outer iterations an atom may stay unused before it is re-seeded
    /// with the worst-reconstructed signal.
    pub dead_atom_patience: usize,
    pub seed: u64,
}

impl Default for DictLearnConfig {
    fn default() -> Self {
        Self {
            atoms: 130,
            k: 10,
            tol: 0.01,
            max_iter: 200,
            bcd_sweeps: 1,
            convergence_eps: 1e-4,
            dead_atom_patience: 5,
            seed: 0,
        }
    }
}

impl DictLearnConfig {
    pub fn omp(&self) -> OmpConfig {
        OmpConfig { k: self.k, tol: self.tol }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms == 0 || self.k == 0 || self.max_iter == 0 || self.bcd_sweeps == 0 {
            return Err(Error::invalid("atoms, k, max_iter and bcd_sweeps must be positive"));
        }
        if self.dead_atom_patience == 0 {
            return Err(Error::invalid("dead_atom_patience must be positive"));
        }
        if self.tol.is_nan() || self.tol < 0.0 || self.convergence_eps.is_nan() || self.convergence_eps < 0.0 {
            return Err(Error::invalid("tol and convergence_eps must be >= 0"));
        }
        Ok(())
    }
}

/// Dense column-major square matrix `A` and `n x m` matrix `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub dict: Dictionary,
    /// `m x m`, column-major.
    pub a: Vec<f64>,
    /// `n x m`, column-major.
    pub b: Vec<f64>,
    pub iteration: usize,
}

impl LearnerState {
    pub fn new(dict: Dictionary) -> Self {
        let (n, m) = (dict.n(), dict.m());
        Self { dict, a: vec![0.0; m * m], b: vec![0.0; n * m], iteration: 0 }
    }

    pub fn a_col(&self, j: usize) -> &[f64] {
        let m = self.dict.m();
        &self.a[j * m..(j + 1) * m]
    }

    pub fn b_col(&self, j: usize) -> &[f64] {
        let n = self.dict.n();
        &self.b[j * n..(j + 1) * n]
    }
}

/// Pick `m` distinct nonzero signals uniformly at random and scale each to
/// unit norm.
pub fn init_dictionary<S: AsRef<[f64]>>(signals: &[S], cfg: &DictLearnConfig) -> Result<Dictionary> {
    cfg.validate()?;
    let m = cfg.atoms;
    if signals.len() < m {
        return Err(Error::Insufficient(format!(
            "{} unlabeled signals for {m} atoms",
            signals.len()
        )));
    }
    let mut order: Vec<usize> = (0..signals.len()).collect();
    order.shuffle(&mut seed::rng(cfg.seed));
    let mut chosen: Vec<&[f64]> = Vec::with_capacity(m);
    for i in order {
        let s = signals[i].as_ref();
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::at(i, Error::NonFinite(0)));
        }
        if norm2(s) == 0.0 || chosen.contains(&s) {
            continue;
        }
        chosen.push(s);
        if chosen.len() == m {
            break;
        }
    }
    if chosen.len() < m {
        return Err(Error::Insufficient(format!(
            "only {} distinct nonzero signals for {m} atoms",
            chosen.len()
        )));
    }
    let columns: Vec<Vec<f64>> = chosen.into_iter().map(unit).collect();
    Dictionary::from_columns(&columns)
}

fn unit(s: &[f64]) -> Vec<f64> {
    let norm = norm2(s);
    let mut v: Vec<f64> = s.iter().map(|x| x / norm).collect();
    // Guard the <= 1 invariant against the last ulp.
    let after = norm2(&v);
    if after > 1.0 {
        v.iter_mut().for_each(|x| *x /= after);
    }
    v
}

/// `A = sum a a^T` (`m x m`) and `B = sum x a^T` (`n x m`), column-major.
pub fn accumulate_stats<S: AsRef<[f64]>>(
    codes: &[SparseCode],
    signals: &[S],
    n: usize,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if codes.len() != signals.len() {
        return Err(Error::DimensionMismatch { expected: signals.len(), got: codes.len() });
    }
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; n * m];
    for (i, (code, x)) in codes.iter().zip(signals).enumerate() {
        let x = x.as_ref();
        if code.m() != m {
            return Err(Error::at(i, Error::DimensionMismatch { expected: m, got: code.m() }));
        }
        if x.len() != n {
            return Err(Error::at(i, Error::DimensionMismatch { expected: n, got: x.len() }));
        }
        for (p, vp) in code.iter() {
            for (q, vq) in code.iter() {
                a[q * m + p] += vp * vq;
            }
            axpy(vp, x, &mut b[p * n..(p + 1) * n]);
        }
    }
    Ok((a, b))
}

/// One sequential block-coordinate sweep over the atoms of `state.dict`.
/// Atoms with `A_jj < UNUSED_ATOM_ENERGY` are left as they are.
pub fn bcd_update(state: &LearnerState) -> Dictionary {
    let mut dict = state.dict.clone();
    bcd_sweep(&mut dict, &state.a, &state.b);
    dict
}

fn bcd_sweep(dict: &mut Dictionary, a: &[f64], b: &[f64]) {
    let (n, m) = (dict.n(), dict.m());
    let mut d_aj = vec![0.0; n];
    for j in 0..m {
        let a_col = &a[j * m..(j + 1) * m];
        let ajj = a_col[j];
        if ajj < UNUSED_ATOM_ENERGY {
            continue;
        }
        d_aj.iter_mut().for_each(|v| *v = 0.0);
        for (l, &alj) in a_col.iter().enumerate() {
            if alj != 0.0 {
                axpy(alj, dict.atom(l), &mut d_aj);
            }
        }
        let b_col = &b[j * n..(j + 1) * n];
        let atom = dict.atom_mut(j);
        for ((d, &bj), &da) in atom.iter_mut().zip(b_col).zip(&d_aj) {
            *d += (bj - da) / ajj;
        }
        project_unit_ball(atom);
    }
}

/// `u / max(||u||, 1)`.
pub fn project_unit_ball(u: &mut [f64]) {
    let norm = norm2(u);
    if norm > 1.0 {
        u.iter_mut().for_each(|v| *v /= norm);
        let after = norm2(u);
        if after > 1.0 {
            u.iter_mut().for_each(|v| *v /= after);
        }
    }
}

/// `1/2 sum ||x_i - D a_i||^2`.
pub fn objective<S: AsRef<[f64]>>(signals: &[S], dict: &Dictionary, codes: &[SparseCode]) -> f64 {
    0.5 * signals
        .iter()
        .zip(codes)
        .map(|(x, c)| omp::reconstruction_error(x.as_ref(), dict, c))
        .sum::<f64>()
}

/// Relative Frobenius change `||new - old||_F / ||old||_F`.
pub fn relative_change(old: &Dictionary, new: &Dictionary) -> f64 {
    let a = old.as_column_major();
    let b = new.as_column_major();
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let base = dot(a, a);
    if base == 0.0 {
        libm::sqrt(diff)
    } else {
        libm::sqrt(diff / base)
    }
}

/// A function encoding a batch of signals; lets callers plug in a parallel
/// encoder that must return the same codes as [`omp::batch_encode`].
pub trait BatchEncoder {
    fn encode(&self, signals: &[&[f64]], dict: &Dictionary, cfg: &OmpConfig) -> Result<Vec<SparseCode>>;
}

/// Plain sequential encoding.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BatchEncoder for Sequential {
    fn encode(&self, signals: &[&[f64]], dict: &Dictionary, cfg: &OmpConfig) -> Result<Vec<SparseCode>> {
        omp::batch_encode(signals, dict, cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub iteration: usize,
    /// Objective with fresh codes against the dictionary entering the
    /// iteration.
    pub objective_before: f64,
    /// Objective with the same codes after the atom sweeps.
    pub objective_after: f64,
    pub relative_change: f64,
    pub reseeded_atoms: usize,
}

/// Outer-loop driver that keeps the state observable between iterations.
pub struct DictionaryLearner<'a> {
    signals: Vec<&'a [f64]>,
    cfg: DictLearnConfig,
    state: LearnerState,
    unused_streak: Vec<usize>,
    history: Vec<IterationRecord>,
    converged: bool,
}

impl<'a> DictionaryLearner<'a> {
    pub fn new<S: AsRef<[f64]>>(signals: &'a [S], cfg: &DictLearnConfig) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::Empty("dictionary learning needs unlabeled signals"));
        }
        let dict = init_dictionary(signals, cfg)?;
        Self::with_dictionary(signals, cfg, dict)
    }

    pub fn with_dictionary<S: AsRef<[f64]>>(
        signals: &'a [S],
        cfg: &DictLearnConfig,
        dict: Dictionary,
    ) -> Result<Self> {
        cfg.validate()?;
        let signals: Vec<&[f64]> = signals.iter().map(|s| s.as_ref()).collect();
        if let Some(i) = signals.iter().position(|s| s.len() != dict.n()) {
            return Err(Error::at(
                i,
                Error::DimensionMismatch { expected: dict.n(), got: signals[i].len() },
            ));
        }
        cfg.omp().validate(&dict)?;
        let m = dict.m();
        Ok(Self {
            signals,
            cfg: cfg.clone(),
            state: LearnerState::new(dict),
            unused_streak: vec![0; m],
            history: Vec::new(),
            converged: false,
        })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.state.dict
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }

    pub fn history(&self) -> &[IterationRecord] {
        &self.history
    }

    pub fn is_done(&self) -> bool {
        self.converged || self.state.iteration >= self.cfg.max_iter
    }

    /// Run one outer iteration: encode, accumulate, sweep, reseed dead
    /// atoms.
    pub fn step(&mut self, encoder: &impl BatchEncoder) -> Result<&IterationRecord> {
        let omp_cfg = self.cfg.omp();
        let codes = encoder.encode(&self.signals, &self.state.dict, &omp_cfg)?;
        let (n, m) = (self.state.dict.n(), self.state.dict.m());
        let (a, b) = accumulate_stats(&codes, &self.signals, n, m)?;
        self.state.a = a;
        self.state.b = b;

        let previous = self.state.dict.clone();
        let objective_before = objective(&self.signals, &previous, &codes);
        for _ in 0..self.cfg.bcd_sweeps {
            bcd_sweep(&mut self.state.dict, &self.state.a, &self.state.b);
        }
        let objective_after = objective(&self.signals, &self.state.dict, &codes);
        let reseeded = self.reseed_dead_atoms(&codes);

        let change = relative_change(&previous, &self.state.dict);
        self.state.iteration += 1;
        if change < self.cfg.convergence_eps && reseeded == 0 {
            self.converged = true;
        }
        self.history.push(IterationRecord {
            iteration: self.state.iteration,
            objective_before,
            objective_after,
            relative_change: change,
            reseeded_atoms: reseeded,
        });
        Ok(self.history.last().unwrap())
    }

    pub fn run(&mut self, encoder: &impl BatchEncoder) -> Result<()> {
        while !self.is_done() {
            self.step(encoder)?;
        }
        Ok(())
    }

    pub fn into_dictionary(self) -> Dictionary {
        self.state.dict
    }

    fn reseed_dead_atoms(&mut self, codes: &[SparseCode]) -> usize {
        let m = self.state.dict.m();
        let mut dead = Vec::new();
        for j in 0..m {
            if self.state.a[j * m + j] < UNUSED_ATOM_ENERGY {
                self.unused_streak[j] += 1;
                if self.unused_streak[j] >= self.cfg.dead_atom_patience {
                    dead.push(j);
                }
            } else {
                self.unused_streak[j] = 0;
            }
        }
        if dead.is_empty() {
            return 0;
        }
        let mut errors: Vec<(usize, f64)> = self
            .signals
            .iter()
            .zip(codes)
            .enumerate()
            .map(|(i, (x, c))| (i, omp::reconstruction_error(x, &self.state.dict, c)))
            .filter(|&(i, e)| e > 0.0 && norm2(self.signals[i]) > 0.0)
            .collect();
        errors.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut reseeded = 0;
        for (j, (i, _)) in dead.into_iter().zip(errors) {
            let fresh = unit(self.signals[i]);
            self.state.dict.atom_mut(j).copy_from_slice(&fresh);
            self.unused_streak[j] = 0;
            reseeded += 1;
        }
        reseeded
    }
}

/// Learn a dictionary from unlabeled signals with the sequential encoder.
pub fn learn_dictionary<S: AsRef<[f64]>>(signals: &[S], cfg: &DictLearnConfig) -> Result<Dictionary> {
    learn_dictionary_with(signals, cfg, &Sequential)
}

pub fn learn_dictionary_with<S: AsRef<[f64]>>(
    signals: &[S],
    cfg: &DictLearnConfig,
    encoder: &impl BatchEncoder,
) -> Result<Dictionary> {
    let mut learner = DictionaryLearner::new(signals, cfg)?;
    learner.run(encoder)?;
    Ok(learner.into_dictionary())
}

/// Re-encode labeled instances against a learned dictionary, keeping labels.
pub fn transform_labeled(
    labeled: &[Instance],
    dict: &Dictionary,
    cfg: &OmpConfig,
) -> Result<Vec<(SparseCode, usize)>> {
    labeled
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let y = inst.label.ok_or(Error::MissingLabel(i))?;
            let code = omp::omp_encode(&inst.features, dict, cfg).map_err(|e| Error::at(i, e))?;
            Ok((code, y))
        })
        .collect()
}
