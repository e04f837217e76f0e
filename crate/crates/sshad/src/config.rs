//! Run configuration, loadable from JSON or TOML. Keys match field names;
//! omitted keys take their defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sshad_core::dictionary::DictLearnConfig;
use sshad_core::seed::{self, stage};
use sshad_core::tree::HadConfig;

use crate::error::{Error, Result};
use crate::io::{read_file, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Dictionary-learned sparse codes fed to the tree.
    Sshad,
    /// The tree on normalized raw features.
    HadBaseline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sshad => "sshad",
            Mode::HadBaseline => "had_baseline",
        }
    }
}

/// Source of the elapsed time behind `elapsed_seconds` and `ram_hours`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    Wall,
    /// No clock: time and RAM-hours are reported as zero and every output
    /// file is byte-reproducible.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Labeled dataset file (class in the last column).
    pub labeled: PathBuf,
    /// Unlabeled dataset file. Without one, the labeled file is split by
    /// class: `labeled_fraction` of each class stays labeled and the rest
    /// is stripped of labels to form the unlabeled pool.
    pub unlabeled: Option<PathBuf>,
    /// File format; inferred from the extension when absent.
    pub format: Option<Format>,
    /// Expected class names in index order; discovered when absent.
    pub classes: Option<Vec<String>>,
    pub labeled_fraction: f64,
    /// Keep only the first this-many unlabeled instances.
    pub unlabeled_limit: Option<usize>,
    pub sampling_ratios: Vec<f64>,
    /// Fraction of the labeled pool replaced by N(0, 3^2) noise after
    /// normalization.
    pub bad_data_fraction: f64,
    /// Dictionary learning; its `k` and `tol` also drive the labeled
    /// re-encoding. `seed` is overwritten by the value derived from `seed`.
    pub dictionary: DictLearnConfig,
    pub tree: HadConfig,
    pub folds: usize,
    pub seed: u64,
    pub snapshot_every: u64,
    pub timing: Timing,
    /// Encode with the rayon pool (results are identical either way).
    pub parallel: bool,
    /// Also write a model snapshot per fold.
    pub save_models: bool,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Sshad,
            labeled: PathBuf::new(),
            unlabeled: None,
            format: None,
            classes: None,
            labeled_fraction: 0.2,
            unlabeled_limit: None,
            sampling_ratios: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            bad_data_fraction: 0.0,
            dictionary: DictLearnConfig::default(),
            tree: HadConfig::default(),
            folds: 10,
            seed: 1,
            snapshot_every: 1000,
            timing: Timing::Wall,
            parallel: true,
            save_models: false,
            output: PathBuf::from("run"),
        }
    }
}

/// Seeds of every random stage, all derived from the root seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub root: u64,
    pub split: u64,
    pub dictionary: u64,
    pub bad_data: u64,
}

impl Seeds {
    pub fn derive(root: u64) -> Self {
        Self {
            root,
            split: seed::derive(root, &[stage::SPLIT]),
            dictionary: seed::derive(root, &[stage::DICTIONARY]),
            bad_data: seed::derive(root, &[stage::BAD_DATA]),
        }
    }

    /// Seed of the labeled sample at `ratio`. Keyed by the ratio itself so
    /// a ratio draws the same sample whatever grid it appears in.
    pub fn sample(&self, ratio: f64) -> u64 {
        seed::derive(self.root, &[stage::SAMPLE, ratio_key(ratio)])
    }

    pub fn fold(&self, ratio: f64, fold: usize) -> u64 {
        seed::derive(self.root, &[stage::FOLD_ORDER, ratio_key(ratio), fold as u64])
    }
}

/// Ratio in basis points.
pub fn ratio_key(ratio: f64) -> u64 {
    (ratio * 10_000.0).round() as u64
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let parsed = match ext.as_deref() {
            Some("toml") => toml::from_str(&text).map_err(|e| e.to_string()),
            Some("json") => serde_json::from_str(&text).map_err(|e| e.to_string()),
            _ => serde_json::from_str(&text)
                .map_err(|e| e.to_string())
                .or_else(|_| toml::from_str(&text).map_err(|e| e.to_string())),
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn format_of(&self, path: &Path) -> Result<Format> {
        self.format.or_else(|| Format::from_path(path)).ok_or_else(|| {
            Error::Config(format!("cannot infer the format of {}; set `format`", path.display()))
        })
    }

    /// Check every field and fill in the derived values (dictionary seed,
    /// formats), returning the configuration the run actually uses.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = self.clone();
        if cfg.labeled.as_os_str().is_empty() {
            return Err(Error::Config("`labeled` dataset path is required".into()));
        }
        cfg.format = Some(cfg.format_of(&cfg.labeled)?);
        if let Some(u) = &cfg.unlabeled {
            if Format::from_path(u).is_some_and(|f| Some(f) != cfg.format) && self.format.is_none() {
                return Err(Error::Config("labeled and unlabeled files differ in format".into()));
            }
        }
        if cfg.unlabeled.is_none() && !(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction < 1.0) {
            return Err(Error::Config("`labeled_fraction` must lie in (0, 1)".into()));
        }
        if cfg.sampling_ratios.is_empty() {
            return Err(Error::Config("`sampling_ratios` is empty".into()));
        }
        if let Some(r) = cfg.sampling_ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::Config(format!("sampling ratio {r} outside (0, 1]")));
        }
        let mut keys: Vec<u64> = cfg.sampling_ratios.iter().map(|&r| ratio_key(r)).collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate sampling ratios".into()));
        }
        if !(0.0..1.0).contains(&cfg.bad_data_fraction) {
            return Err(Error::Config("`bad_data_fraction` must lie in [0, 1)".into()));
        }
        if cfg.folds == 0 {
            return Err(Error::Config("`folds` must be >= 1".into()));
        }
        if cfg.snapshot_every == 0 {
            return Err(Error::Config("`snapshot_every` must be >= 1".into()));
        }
        if cfg.unlabeled_limit == Some(0) {
            return Err(Error::Config("`unlabeled_limit` must be >= 1".into()));
        }
        cfg.dictionary.seed = Seeds::derive(cfg.seed).dictionary;
        cfg.dictionary.validate().map_err(|e| Error::Config(format!("dictionary: {e}")))?;
        cfg.tree.validate().map_err(|e| Error::Config(format!("tree: {e}")))?;
        Ok(cfg)
    }

    /// Settings the mode does not consume, listed in the manifest.
    pub fn ignored(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.mode == Mode::HadBaseline {
            out.push("dictionary".into());
        }
        if self.unlabeled.is_some() {
            out.push("labeled_fraction".into());
        }
        out
    }
}
