//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerical routines.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller, kept local so the oracle does not share code with the crate
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `m` random unit-norm columns of length `n`.
pub fn random_unit_columns(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest absolute inner product between distinct columns.
pub fn coherence(cols: &[Vec<f64>]) -> f64 {
    let mut mu: f64 = 0.0;
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            mu = mu.max(dot(&cols[i], &cols[j]).abs());
        }
    }
    mu
}

/// Solve a square system by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

pub struct ReferenceOmp {
    pub order: Vec<usize>,
    pub residual_sq: Vec<f64>,
    pub coef: Vec<f64>,
}

/// Greedy OMP with an explicit normal-equation solve at every step.
pub fn reference_omp(x: &[f64], cols: &[Vec<f64>], k: usize, tol: f64) -> ReferenceOmp {
    let mut order: Vec<usize> = Vec::new();
    let mut residual = x.to_vec();
    let mut residual_sq = vec![dot(&residual, &residual)];
    let mut coef = Vec::new();
    loop {
        if *residual_sq.last().unwrap() <= tol || order.len() >= k {
            break;
        }
        let mut best = None;
        let mut best_c = -1.0;
        for (j, c) in cols.iter().enumerate() {
            if order.contains(&j) {
                continue;
            }
            let v = dot(c, &residual).abs();
            if v > best_c {
                best_c = v;
                best = Some(j);
            }
        }
        if best_c < 1e-12 {
            break;
        }
        let mut trial = order.clone();
        trial.push(best.unwrap());
        let gram: Vec<Vec<f64>> = trial
            .iter()
            .map(|&i| trial.iter().map(|&j| dot(&cols[i], &cols[j])).collect())
            .collect();
        let rhs: Vec<f64> = trial.iter().map(|&i| dot(&cols[i], x)).collect();
        let Some(c) = solve(gram, rhs) else { break };
        order = trial;
        coef = c;
        residual = x.to_vec();
        for (&j, &cj) in order.iter().zip(&coef) {
            for (r, d) in residual.iter_mut().zip(&cols[j]) {
                *r -= cj * d;
            }
        }
        residual_sq.push(dot(&residual, &residual));
    }
    ReferenceOmp { order, residual_sq, coef }
}

/// Dense `sum_i ||x_i - D a_i||^2 / 2` with codes given as dense vectors.
pub fn dense_objective(signals: &[Vec<f64>], cols: &[Vec<f64>], codes: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, a) in signals.iter().zip(codes) {
        for (r, xr) in x.iter().enumerate() {
            let recon: f64 = cols.iter().zip(a).map(|(c, aj)| c[r] * aj).sum();
            total += (xr - recon) * (xr - recon);
        }
    }
    0.5 * total
}

/// Change detector that keeps the whole window as a list and tests every
/// split point with the same Hoeffding-style bound, dropping the oldest
/// element while any cut is significant.
pub struct ExhaustiveWindow {
    pub window: std::collections::VecDeque<f64>,
    pub delta: f64,
    pub min_side: usize,
}

impl ExhaustiveWindow {
    pub fn new(delta: f64) -> Self {
        Self { window: Default::default(), delta, min_side: 5 }
    }

    pub fn add(&mut self, v: f64) -> bool {
        self.window.push_back(v);
        let mut changed = false;
        while self.cut_exists() {
            self.window.pop_front();
            changed = true;
        }
        changed
    }

    fn cut_exists(&self) -> bool {
        let n = self.window.len();
        if n < 2 * self.min_side {
            return false;
        }
        let total: f64 = self.window.iter().sum();
        let mean = total / n as f64;
        let var = self.window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let log_term = (2.0 * (n as f64).ln() / self.delta).ln();
        let mut s0 = 0.0;
        for (i, v) in self.window.iter().enumerate() {
            s0 += v;
            let n0 = i + 1;
            let n1 = n - n0;
            if n0 < self.min_side || n1 < self.min_side {
                continue;
            }
            let inv = 1.0 / n0 as f64 + 1.0 / n1 as f64;
            let eps = (2.0 * inv * var * log_term).sqrt() + 2.0 / 3.0 * inv * log_term;
            if (s0 / n0 as f64 - (total - s0) / n1 as f64).abs() > eps {
                return true;
            }
        }
        false
    }
}

/// Best single-feature threshold rule over a labeled batch, by exhaustive
/// scan of midpoints. Returns (feature, threshold, accuracy).
pub fn best_stump(data: &[(Vec<f64>, usize)]) -> (usize, f64, f64) {
    let d = data[0].0.len();
    let n = data.len() as f64;
    let mut best = (0, 0.0, 0.0);
    for f in 0..d {
        let mut vals: Vec<(f64, usize)> = data.iter().map(|(x, y)| (x[f], *y)).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ones_total = vals.iter().filter(|v| v.1 == 1).count();
        let mut ones_left = 0;
        for i in 0..vals.len() - 1 {
            if vals[i].1 == 1 {
                ones_left += 1;
            }
            let t = 0.5 * (vals[i].0 + vals[i + 1].0);
            let left = i + 1;
            // predict 0 left / 1 right, or the reverse
            let acc_a = ((left - ones_left) + (ones_total - ones_left)) as f64 / n;
            let acc = acc_a.max(1.0 - acc_a);
            if acc > best.2 {
                best = (f, t, acc);
            }
        }
    }
    best
}

/// Random orthogonal n×n matrix (rows), via Gram-Schmidt on a Gaussian draw.
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        for b in &q {
            let p = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= p * bi;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    q
}

/// Union of the identity and the normalized 4×4 Hadamard basis, randomly
/// rotated, permuted and sign-flipped. Mutual coherence is exactly 1/2.
pub fn incoherent_4x8(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut base: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let h = [[1., 1., 1., 1.], [1., -1., 1., -1.], [1., 1., -1., -1.], [1., -1., -1., 1.]];
    base.extend(h.iter().map(|row| row.iter().map(|x| x / 2.0).collect::<Vec<f64>>()));
    let q = random_orthogonal(4, rng);
    let mut cols: Vec<Vec<f64>> = base
        .iter()
        .map(|c| {
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (0..4).map(|i| s * (0..4).map(|j| q[j][i] * c[j]).sum::<f64>()).collect()
        })
        .collect();
    for i in (1..cols.len()).rev() {
        let j = rng.random_range(0..=i);
        cols.swap(i, j);
    }
    cols
}

/// Exactly 2-sparse signal on a random support; returns (x, sorted support).
pub fn two_sparse(cols: &[Vec<f64>], rng: &mut ChaCha8Rng) -> (Vec<f64>, [usize; 2]) {
    let m = cols.len();
    let i = rng.random_range(0..m);
    let mut j = rng.random_range(0..m - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (gaussian(rng), gaussian(rng));
    let x = (0..cols[0].len()).map(|t| a * cols[i][t] + b * cols[j][t]).collect();
    (x, [i.min(j), i.max(j)])
}

/// Signals drawn as `k`-sparse Gaussian combinations of a random unit
/// dictionary plus isotropic noise.
pub fn synthetic_signals(
    n: usize,
    m: usize,
    k: usize,
    count: usize,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let cols = random_unit_columns(n, m, rng);
    let signals = (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..n).map(|_| noise * gaussian(rng)).collect();
            let mut used = Vec::new();
            while used.len() < k {
                let j = rng.random_range(0..m);
                if !used.contains(&j) {
                    used.push(j);
                }
            }
            for j in used {
                let a = gaussian(rng);
                for (xi, d) in x.iter_mut().zip(&cols[j]) {
                    *xi += a * d;
                }
            }
            x
        })
        .collect();
    (cols, signals)
}
