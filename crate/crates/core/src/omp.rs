//! k-sparse encoding by Orthogonal Matching Pursuit.
//!
//! Each step picks the atom with the largest absolute correlation with the
//! current residual (lowest index on ties), extends an incremental QR
//! factorization of the selected atoms, and re-solves least squares on the
//! support. The residual is therefore always orthogonal to the selected
//! atoms and its norm never grows.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Correlations below this are treated as zero and stop the pursuit.
pub const MIN_CORRELATION: f64 = 1e-12;

/// A new atom whose component orthogonal to the current support is shorter
/// than this is treated as linearly dependent on it.
const RANK_TOL: f64 = 1e-10;

/// Column norms may exceed one by at most this much.
pub const NORM_SLACK: f64 = 1e-12;

/// An `n x m` matrix of atoms stored column-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dictionary {
    n: usize,
    m: usize,
    atoms: Vec<f64>,
}

impl Dictionary {
    /// Build from column-major values. Every column must have norm at most
    /// `1 + NORM_SLACK` and all values must be finite.
    pub fn from_column_major(n: usize, m: usize, atoms: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid("dictionary dimensions must be positive"));
        }
        if atoms.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, got: atoms.len() });
        }
        if let Some(i) = atoms.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let d = Self { n, m, atoms };
        for j in 0..m {
            let norm = norm2(d.atom(j));
            if norm > 1.0 + NORM_SLACK {
                return Err(Error::invalid(format!("atom {j} has norm {norm} > 1")));
            }
        }
        Ok(d)
    }

    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.as_ref().len());
        let mut atoms = Vec::with_capacity(n * columns.len());
        for c in columns {
            let c = c.as_ref();
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            atoms.extend_from_slice(c);
        }
        Self::from_column_major(n, columns.len(), atoms)
    }

    pub fn identity(n: usize) -> Self {
        let mut atoms = vec![0.0; n * n];
        for j in 0..n {
            atoms[j * n + j] = 1.0;
        }
        Self { n, m: n, atoms }
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Atom count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        &self.atoms[j * self.n..(j + 1) * self.n]
    }

    pub(crate) fn atom_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.atoms[j * n..(j + 1) * n]
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.atoms
    }

    /// `D * code` as a dense n-vector.
    pub fn reconstruct(&self, code: &SparseCode) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, v) in code.iter() {
            axpy(v, self.atom(j), &mut out);
        }
        out
    }

    /// `D^T x` restricted to atom `j`.
    pub fn correlate(&self, j: usize, x: &[f64]) -> f64 {
        dot(self.atom(j), x)
    }
}

/// A coefficient vector of ambient dimension `m` with sorted support.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseCode {
    m: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCode {
    pub fn zeros(m: usize) -> Self {
        Self { m, indices: Vec::new(), values: Vec::new() }
    }

    /// Build from `(index, value)` pairs. Pairs are sorted; exact zeros are
    /// dropped; duplicate or out-of-range indices are rejected.
    pub fn from_pairs(m: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        for (j, v) in pairs {
            if j >= m {
                return Err(Error::DimensionMismatch { expected: m, got: j + 1 });
            }
            if indices.last() == Some(&j) {
                return Err(Error::invalid(format!("duplicate atom index {j}")));
            }
            if v != 0.0 {
                indices.push(j);
                values.push(v);
            }
        }
        Ok(Self { m, indices, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, j: usize) -> f64 {
        self.indices.binary_search(&j).map_or(0.0, |p| self.values[p])
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (j, v) in self.iter() {
            out[j] = v;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OmpConfig {
    /// Maximum number of nonzeros.
    pub k: usize,
    /// Stop once the squared residual norm is at or below this.
    pub tol: f64,
}

impl Default for OmpConfig {
    fn default() -> Self {
        Self { k: 10, tol: 0.01 }
    }
}

impl OmpConfig {
    pub fn validate(&self, dict: &Dictionary) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("OMP sparsity k must be positive"));
        }
        if self.k > dict.n().min(dict.m()) {
            return Err(Error::invalid(format!(
                "OMP sparsity k = {} exceeds min(n, m) = {}",
                self.k,
                dict.n().min(dict.m())
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid(format!("OMP tolerance {} must be >= 0", self.tol)));
        }
        Ok(())
    }
}

/// Why a pursuit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    Sparsity,
    NoCorrelation,
    RankDeficient,
}

/// Per-step record of a pursuit: selection order and the squared residual
/// norm before the first step and after each accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpTrace {
    pub order: Vec<usize>,
    pub residual_sq: Vec<f64>,
    pub stop: StopReason,
}

pub fn omp_encode(x: &[f64], dict: &Dictionary, cfg: &OmpConfig) -> Result<SparseCode> {
    omp_encode_traced(x, dict, cfg).map(|(code, _)| code)
}

pub fn omp_encode_traced(
    x: &[f64],
    dict: &Dictionary,
    cfg: &OmpConfig,
) -> Result<(SparseCode, OmpTrace)> {
    cfg.validate(dict)?;
    if x.len() != dict.n() {
        return Err(Error::DimensionMismatch { expected: dict.n(), got: x.len() });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }

    let mut support: Vec<usize> = Vec::with_capacity(cfg.k);
    // Orthonormal basis of the support (Q) and the upper-triangular R with
    // D_S = Q R, stored column by column.
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cfg.k);
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(cfg.k);
    let mut qtx: Vec<f64> = Vec::with_capacity(cfg.k);
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = x.to_vec();
    let mut trace = OmpTrace {
        order: Vec::new(),
        residual_sq: vec![dot(&residual, &residual)],
        stop: StopReason::Sparsity,
    };

    loop {
        let res_sq = *trace.residual_sq.last().unwrap();
        if res_sq <= cfg.tol {
            trace.stop = StopReason::Tolerance;
            break;
        }
        if support.len() >= cfg.k {
            trace.stop = StopReason::Sparsity;
            break;
        }

        let mut best: Option<(usize, f64)> = None;
        for j in 0..dict.m() {
            if support.contains(&j) {
                continue;
            }
            let c = dict.correlate(j, &residual).abs();
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let Some((j, _)) = best.filter(|&(_, c)| c >= MIN_CORRELATION) else {
            trace.stop = StopReason::NoCorrelation;
            break;
        };

        // Gram-Schmidt with one re-orthogonalization pass.
        let atom = dict.atom(j);
        let mut v = atom.to_vec();
        let mut rcol = vec![0.0; support.len() + 1];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot(qi, &v);
                rcol[i] += h;
                axpy(-h, qi, &mut v);
            }
        }
        let len = norm2(&v);
        if len <= RANK_TOL * norm2(atom).max(f64::MIN_POSITIVE) || len <= RANK_TOL {
            trace.stop = StopReason::RankDeficient;
            break;
        }
        v.iter_mut().for_each(|e| *e /= len);
        rcol[support.len()] = len;
        qtx.push(dot(&v, x));
        q.push(v);
        r.push(rcol);
        support.push(j);

        coef = back_substitute(&r, &qtx);
        residual.copy_from_slice(x);
        for (&s, &c) in support.iter().zip(&coef) {
            axpy(-c, dict.atom(s), &mut residual);
        }
        trace.order.push(j);
        trace.residual_sq.push(dot(&residual, &residual));
    }

    let pairs = support.into_iter().zip(coef).collect();
    Ok((SparseCode::from_pairs(dict.m(), pairs)?, trace))
}

/// Encode every signal with [`omp_encode`]; errors carry the instance index.
pub fn batch_encode<S: AsRef<[f64]>>(
    signals: &[S],
    dict: &Dictionary,
    cfg: &OmpConfig,
) -> Result<Vec<SparseCode>> {
    signals
        .iter()
        .enumerate()
        .map(|(i, x)| omp_encode(x.as_ref(), dict, cfg).map_err(|e| Error::at(i, e)))
        .collect()
}

/// Squared reconstruction error `||x - D code||^2`. The encoding objective
/// is half of this value.
pub fn reconstruction_error(x: &[f64], dict: &Dictionary, code: &SparseCode) -> f64 {
    let recon = dict.reconstruct(code);
    x.iter().zip(&recon).map(|(a, b)| (a - b) * (a - b)).sum()
}

// Solve R c = y for upper-triangular R stored as columns.
fn back_substitute(r: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = y.len();
    let mut c = y.to_vec();
    for i in (0..k).rev() {
        for j in i + 1..k {
            c[i] -= r[j][i] * c[j];
        }
        c[i] /= r[i][i];
    }
    c
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_signal_gives_empty_code() {
        let d = Dictionary::identity(3);
        let code = omp_encode(&[0.0; 3], &d, &OmpConfig { k: 2, tol: 0.0 }).unwrap();
        assert_eq!(code.nnz(), 0);
        assert_eq!(code.m(), 3);
    }

    #[test]
    fn identity_dictionary() {
        let d = Dictionary::identity(3);
        let x = [0.5, 0.0, 0.0];
        let code = omp_encode(&x, &d, &OmpConfig { k: 1, tol: 0.0 }).unwrap();
        assert_eq!(code.indices(), &[0]);
        assert_eq!(code.values(), &[0.5]);
        assert_eq!(reconstruction_error(&x, &d, &code), 0.0);
    }

    #[test]
    fn ties_pick_lowest_index() {
        let d = Dictionary::identity(3);
        let code = omp_encode(&[0.0, 1.0, 1.0], &d, &OmpConfig { k: 1, tol: 0.0 }).unwrap();
        assert_eq!(code.indices(), &[1]);
    }

    #[test]
    fn tolerance_checked_before_sparsity() {
        let d = Dictionary::identity(3);
        let (_, trace) =
            omp_encode_traced(&[1.0, 0.05, 0.0], &d, &OmpConfig { k: 1, tol: 0.01 }).unwrap();
        assert_eq!(trace.stop, StopReason::Tolerance);
    }

    #[test]
    fn duplicate_atoms_stop_without_crash() {
        let a = [1.0, 0.0];
        let d = Dictionary::from_columns(&[a, a]).unwrap();
        // residual after the first atom is orthogonal to both copies
        let (code, trace) =
            omp_encode_traced(&[1.0, 1.0], &d, &OmpConfig { k: 2, tol: 0.0 }).unwrap();
        assert_eq!(code.nnz(), 1);
        assert_ne!(trace.stop, StopReason::Sparsity);
    }

    #[test]
    fn rejects_non_finite_and_bad_width() {
        let d = Dictionary::identity(2);
        let cfg = OmpConfig { k: 1, tol: 0.0 };
        assert_eq!(omp_encode(&[f64::NAN, 0.0], &d, &cfg), Err(Error::NonFinite(0)));
        assert!(omp_encode(&[1.0], &d, &cfg).is_err());
        assert!(omp_encode(&[1.0, 0.0], &d, &OmpConfig { k: 3, tol: 0.0 }).is_err());
    }

    #[test]
    fn dictionary_rejects_long_atoms() {
        assert!(Dictionary::from_columns(&[[2.0, 0.0]]).is_err());
        assert!(Dictionary::from_columns(&[[0.6, 0.8]]).is_ok());
    }

    #[test]
    fn empty_code_error_is_signal_energy() {
        let d = Dictionary::identity(2);
        assert_eq!(reconstruction_error(&[3.0, 4.0], &d, &SparseCode::zeros(2)), 25.0);
    }

    #[test]
    fn batch_attaches_index() {
        let d = Dictionary::identity(2);
        let cfg = OmpConfig { k: 1, tol: 0.0 };
        let empty: Vec<Vec<f64>> = Vec::new();
        assert!(batch_encode(&empty, &d, &cfg).unwrap().is_empty());
        let err = batch_encode(&[vec![1.0, 0.0], vec![f64::INFINITY, 0.0]], &d, &cfg).unwrap_err();
        assert!(matches!(err, Error::AtInstance { index: 1, .. }));
    }
}
