#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sshad::config::{RunConfig, Timing};

/// Small deterministic generator so fixtures do not depend on `rand`.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn gaussian(&mut self) -> f64 {
        let u = self.uniform().max(1e-300);
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

pub const CLASSES: [&str; 3] = ["breaker", "fault", "normal"];

/// Three Gaussian blobs in four dimensions; class `c` is shifted along
/// feature `c`.
pub fn blobs(rows: usize, seed: u64, labeled: bool) -> String {
    blobs_n(rows, 4, seed, labeled)
}

pub fn blobs_n(rows: usize, width: usize, seed: u64, labeled: bool) -> String {
    let mut rng = Lcg::new(seed);
    let names: Vec<String> = (0..width).map(|j| format!("f{j}")).collect();
    let mut out = names.join(",");
    out.push_str(if labeled { ",class\n" } else { "\n" });
    for _ in 0..rows {
        let c = (rng.next_u64() % 3) as usize;
        let x: Vec<String> = (0..width)
            .map(|j| {
                let shift = if j == c { 3.0 } else { 0.0 };
                format!("{:.6}", 10.0 + shift + rng.gaussian())
            })
            .collect();
        write!(out, "{}", x.join(",")).unwrap();
        if labeled {
            write!(out, ",{}", CLASSES[c]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

/// The smoke setup: 4 features, 200 unlabeled and 100 labeled rows,
/// 8 atoms, k = 2, 2 folds.
pub fn smoke_config(dir: &Path) -> RunConfig {
    let labeled = write(dir, "labeled.csv", &blobs(100, 1, true));
    let unlabeled = write(dir, "unlabeled.csv", &blobs(200, 2, false));
    let mut cfg = RunConfig {
        labeled,
        unlabeled: Some(unlabeled),
        sampling_ratios: vec![0.5, 1.0],
        folds: 2,
        timing: Timing::None,
        snapshot_every: 20,
        output: dir.join("run"),
        ..RunConfig::default()
    };
    cfg.dictionary.atoms = 8;
    cfg.dictionary.k = 2;
    cfg.dictionary.max_iter = 20;
    cfg.tree.grace_period = 20;
    cfg
}
