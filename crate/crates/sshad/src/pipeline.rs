//! End-to-end runs: load, split, normalize, optionally corrupt, learn the
//! dictionary and re-encode (SSHAD mode), then evaluate the tree
//! prequentially on every sampling ratio and fold.
//!
//! Output layout of a run directory:
//!
//! ```text
//! dictionary.bin                      (sshad mode, learn-dict)
//! codes.csv                           (learn-dict)
//! ratio-0.30/fold-<i>.report.json
//! ratio-0.30/fold-<i>.trace.csv
//! ratio-0.30/fold-<i>.model.json      (save_models)
//! summary.csv, summary.json
//! manifest.json
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sshad_core::data::{
    fit_normalizer, inject_bad_data_indexed, normalize_all, permutation, sample_indices,
    stratified_split, DatasetSchema, Instance,
};
use sshad_core::dictionary::{BatchEncoder, DictionaryLearner, IterationRecord, Sequential};
use sshad_core::eval::{
    kfold_average, prequential_run, AggregateReport, MeanStd, NullClock, PrequentialReport,
};
use sshad_core::omp::{Dictionary, SparseCode};
use sshad_core::tree::HoeffdingAdaptiveTree;

use crate::clock::WallClock;
use crate::config::{ratio_key, Mode, RunConfig, Seeds, Timing};
use crate::error::{Error, Result, Stage, StageExt};
use crate::io::{load_dataset, read_file, write_file};
use crate::parallel::Parallel;
use crate::persist::{encode_codes_csv, encode_dictionary, encode_model, DictFormat};
use crate::report::{deterministic_part, report_json, trace_csv};

pub const MANIFEST: &str = "manifest.json";
pub const DICTIONARY_FILE: &str = "dictionary.bin";
pub const CODES_FILE: &str = "codes.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_JSON: &str = "summary.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the run directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    /// Hash of the part of the content that is fixed by config and seed
    /// (wall-clock fields removed). Equal to `sha256` for files without
    /// timing data.
    pub content_sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Completed,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub seconds: f64,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n_features: usize,
    pub class_names: Vec<String>,
    pub labeled_rows: usize,
    pub unlabeled_rows: usize,
    /// Rows dropped at load time for NaN, infinite or missing cells.
    pub rejected_labeled_rows: usize,
    pub rejected_unlabeled_rows: usize,
    /// Which instances the normalization statistics were fitted on.
    pub normalization: String,
    pub corrupted_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub ratio: f64,
    pub fold: usize,
    pub instances: usize,
    /// Hash of the fold's stream order, as labeled-pool indices.
    pub order_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub mode: String,
    pub created_unix: u64,
    pub finished_unix: u64,
    pub config: RunConfig,
    /// Configuration sections this run did not consume.
    pub ignored: Vec<String>,
    pub seeds: Seeds,
    pub omp_tolerance: String,
    pub data: Option<DataSummary>,
    pub dictionary_iterations: Vec<IterationRecord>,
    pub stages: Vec<StageRecord>,
    pub folds: Vec<FoldRecord>,
    pub artifacts: Vec<Artifact>,
    pub error: Option<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_slice(&read_file(path)?).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn artifact(&self, path: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.path == path)
    }

    /// Content hashes keyed by path, the comparison key for reruns.
    pub fn content_hashes(&self) -> Vec<(String, String)> {
        let mut v: Vec<_> =
            self.artifacts.iter().map(|a| (a.path.clone(), a.content_sha256.clone())).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub ratio: f64,
    pub folds: usize,
    pub instances: usize,
    pub accuracy: MeanStd,
    pub kappa: MeanStd,
    pub elapsed_seconds: MeanStd,
    pub ram_hours: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: String,
    pub n_classes: usize,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_slice(&read_file(path)?).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "ratio,folds,instances,accuracy_mean,accuracy_std,kappa_mean,kappa_std,time_mean,time_std,ram_hours_mean,ram_hours_std\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.ratio,
                r.folds,
                r.instances,
                r.accuracy.mean,
                r.accuracy.std,
                r.kappa.mean,
                r.kappa.std,
                r.elapsed_seconds.mean,
                r.elapsed_seconds.std,
                r.ram_hours.mean,
                r.ram_hours.std
            )
            .unwrap();
        }
        out
    }

    fn without_timing(&self) -> Summary {
        let mut s = self.clone();
        for r in &mut s.rows {
            r.elapsed_seconds = MeanStd::default();
            r.ram_hours = MeanStd::default();
        }
        s
    }
}

/// Directory of a ratio: `ratio-0.30`, or four decimals when two would
/// not identify it.
pub fn ratio_dir(ratio: f64) -> String {
    if ratio_key(ratio).is_multiple_of(100) {
        format!("ratio-{ratio:.2}")
    } else {
        format!("ratio-{ratio:.4}")
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Normalized data ready for the learning stages.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub schema: DatasetSchema,
    /// Labeled pool, normalized and, if configured, corrupted.
    pub labeled: Vec<Instance>,
    /// Unlabeled pool, normalized.
    pub unlabeled: Vec<Vec<f64>>,
}

struct Run {
    cfg: RunConfig,
    dir: PathBuf,
    manifest: Manifest,
}

impl Run {
    fn new(cfg: &RunConfig) -> Self {
        let seeds = Seeds::derive(cfg.seed);
        Run {
            cfg: cfg.clone(),
            dir: cfg.output.clone(),
            manifest: Manifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                mode: cfg.mode.name().into(),
                created_unix: unix_now(),
                finished_unix: 0,
                config: cfg.clone(),
                ignored: cfg.ignored(),
                seeds,
                omp_tolerance: "absolute bound on the squared residual norm".into(),
                data: None,
                dictionary_iterations: Vec::new(),
                stages: Vec::new(),
                folds: Vec::new(),
                artifacts: Vec::new(),
                error: None,
            },
        }
    }

    fn step<T>(&mut self, stage: Stage, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self).stage(stage);
        self.manifest.stages.push(StageRecord {
            stage,
            status: if out.is_ok() { StageStatus::Completed } else { StageStatus::Failed },
            seconds: start.elapsed().as_secs_f64(),
            detail: None,
        });
        out
    }

    fn skip(&mut self, stage: Stage, why: &str) {
        self.manifest.stages.push(StageRecord {
            stage,
            status: StageStatus::Skipped,
            seconds: 0.0,
            detail: Some(why.into()),
        });
    }

    fn write(&mut self, rel: &str, bytes: &[u8], content: Option<&[u8]>) -> Result<()> {
        write_file(&self.dir.join(rel), bytes)?;
        let sha256 = sha256_hex(bytes);
        let content_sha256 = content.map_or_else(|| sha256.clone(), sha256_hex);
        self.manifest.artifacts.retain(|a| a.path != rel);
        self.manifest.artifacts.push(Artifact { path: rel.into(), sha256, content_sha256 });
        Ok(())
    }

    fn finish(mut self, result: Result<()>) -> Result<Manifest> {
        self.manifest.finished_unix = unix_now();
        if let Err(e) = &result {
            self.manifest.error = Some(e.to_string());
        }
        let bytes = serde_json::to_vec_pretty(&self.manifest).expect("manifest is serializable");
        let written = write_file(&self.dir.join(MANIFEST), &bytes).stage(Stage::Write);
        result?;
        written?;
        Ok(self.manifest)
    }

    fn prepare(&mut self) -> Result<Prepared> {
        let cfg = self.cfg.clone();
        let classes = cfg.classes.as_deref();
        let (schema, pool, loaded_unlabeled, rejected) = self.step(Stage::Load, |_| {
            let format = cfg.format_of(&cfg.labeled)?;
            let labeled = load_dataset(&cfg.labeled, format, true, classes)?;
            let schema = labeled.schema().map_err(|e| Error::Schema {
                path: cfg.labeled.clone(),
                msg: e.to_string(),
            })?;
            let mut rejected = (labeled.rejected_lines.len(), 0);
            let unlabeled = match &cfg.unlabeled {
                Some(path) => {
                    let u = load_dataset(path, cfg.format_of(path)?, false, None)?;
                    if u.n_features() != schema.n_features() {
                        return Err(Error::Schema {
                            path: path.clone(),
                            msg: format!(
                                "{} features, labeled data has {}",
                                u.n_features(),
                                schema.n_features()
                            ),
                        });
                    }
                    rejected.1 = u.rejected_lines.len();
                    Some(u.instances)
                }
                None => None,
            };
            Ok((schema, labeled.instances, unlabeled, rejected))
        })?;

        let seeds = self.manifest.seeds.clone();
        let (labeled, mut unlabeled) = match loaded_unlabeled {
            Some(u) => (pool, u),
            None => self.step(Stage::Load, |_| Ok(stratified_split(&pool, cfg.labeled_fraction, seeds.split)?))?,
        };
        if let Some(limit) = cfg.unlabeled_limit {
            unlabeled.truncate(limit);
        }

        let (labeled, unlabeled) = self.step(Stage::Normalize, |_| {
            let fit: Vec<&[f64]> = unlabeled
                .iter()
                .chain(&labeled)
                .map(|i| i.features.as_slice())
                .collect();
            let stats = fit_normalizer(&fit)?;
            let labeled = normalize_all(&labeled, &stats)?;
            let unlabeled: Vec<Vec<f64>> = normalize_all(&unlabeled, &stats)?
                .into_iter()
                .map(|i| i.features)
                .collect();
            Ok((labeled, unlabeled))
        })?;

        let (labeled, corrupted) = if cfg.bad_data_fraction > 0.0 {
            self.step(Stage::Corrupt, |_| {
                let (out, idx) = inject_bad_data_indexed(&labeled, cfg.bad_data_fraction, seeds.bad_data)?;
                Ok((out, idx.len()))
            })?
        } else {
            self.skip(Stage::Corrupt, "bad_data_fraction is 0");
            (labeled, 0)
        };

        self.manifest.data = Some(DataSummary {
            n_features: schema.n_features(),
            class_names: schema.class_names.clone(),
            labeled_rows: labeled.len(),
            unlabeled_rows: unlabeled.len(),
            rejected_labeled_rows: rejected.0,
            rejected_unlabeled_rows: rejected.1,
            normalization: "z-score fitted on unlabeled pool plus full labeled pool".into(),
            corrupted_rows: corrupted,
        });
        Ok(Prepared { schema, labeled, unlabeled })
    }

    fn learn(&mut self, unlabeled: &[Vec<f64>]) -> Result<Dictionary> {
        let cfg = self.cfg.clone();
        let (dict, history) = self.step(Stage::LearnDictionary, |_| {
            let mut learner = DictionaryLearner::new(unlabeled, &cfg.dictionary)?;
            if cfg.parallel {
                learner.run(&Parallel)?;
            } else {
                learner.run(&Sequential)?;
            }
            let history = learner.history().to_vec();
            Ok((learner.into_dictionary(), history))
        })?;
        self.manifest.dictionary_iterations = history;
        let bytes = encode_dictionary(&dict, DictFormat::Binary);
        self.step(Stage::Write, |run| run.write(DICTIONARY_FILE, &bytes, None))?;
        Ok(dict)
    }

    fn transform(&mut self, labeled: &[Instance], dict: &Dictionary) -> Result<Vec<SparseCode>> {
        let cfg = self.cfg.clone();
        self.step(Stage::Transform, |_| {
            let signals: Vec<&[f64]> = labeled.iter().map(|i| i.features.as_slice()).collect();
            let omp = cfg.dictionary.omp();
            if cfg.parallel {
                Ok(Parallel.encode(&signals, dict, &omp)?)
            } else {
                Ok(Sequential.encode(&signals, dict, &omp)?)
            }
        })
    }

    fn evaluate(&mut self, features: &[Vec<f64>], labels: &[usize], n_classes: usize) -> Result<Summary> {
        let cfg = self.cfg.clone();
        let seeds = self.manifest.seeds.clone();
        let width = features.first().map_or(0, Vec::len);
        let mut per_ratio: Vec<(f64, usize, Vec<PrequentialReport>)> = Vec::new();
        for &ratio in &cfg.sampling_ratios {
            let dir = ratio_dir(ratio);
            let reports = self.step(Stage::Evaluate, |run| {
                let sample = sample_indices(features.len(), ratio, seeds.sample(ratio))?;
                let mut reports = Vec::with_capacity(cfg.folds);
                for fold in 0..cfg.folds {
                    let order: Vec<usize> = permutation(sample.len(), seeds.fold(ratio, fold))
                        .into_iter()
                        .map(|p| sample[p])
                        .collect();
                    let order_bytes: Vec<u8> = order.iter().flat_map(|&i| (i as u64).to_le_bytes()).collect();
                    run.manifest.folds.push(FoldRecord {
                        ratio,
                        fold,
                        instances: order.len(),
                        order_sha256: sha256_hex(&order_bytes),
                    });
                    let mut model = HoeffdingAdaptiveTree::new(width, n_classes, cfg.tree.clone())?;
                    let stream = order.iter().map(|&i| (features[i].as_slice(), labels[i]));
                    let report = match cfg.timing {
                        Timing::Wall => prequential_run(&mut model, stream, cfg.snapshot_every, &mut WallClock::new())?,
                        Timing::None => prequential_run(&mut model, stream, cfg.snapshot_every, &mut NullClock)?,
                    };
                    let stem = format!("{dir}/fold-{fold}");
                    let fixed = deterministic_part(&report);
                    run.write(&format!("{stem}.report.json"), &report_json(&report), Some(&report_json(&fixed)))?;
                    run.write(&format!("{stem}.trace.csv"), &trace_csv(&report), Some(&trace_csv(&fixed)))?;
                    if cfg.save_models {
                        run.write(&format!("{stem}.model.json"), &encode_model(&model), None)?;
                    }
                    reports.push(report);
                }
                Ok((sample.len(), reports))
            })?;
            per_ratio.push((ratio, reports.0, reports.1));
        }

        let summary = self.step(Stage::Aggregate, |_| {
            let mut rows = Vec::new();
            for (ratio, instances, reports) in &per_ratio {
                let agg: AggregateReport = kfold_average(reports)?;
                rows.push(SummaryRow {
                    ratio: *ratio,
                    folds: agg.folds,
                    instances: *instances,
                    accuracy: agg.accuracy,
                    kappa: agg.kappa,
                    elapsed_seconds: agg.elapsed_seconds,
                    ram_hours: agg.ram_hours,
                });
            }
            Ok(Summary { mode: cfg.mode.name().into(), n_classes, rows })
        })?;
        let fixed = summary.without_timing();
        let json = |s: &Summary| serde_json::to_vec_pretty(s).expect("summary is serializable");
        self.step(Stage::Write, |run| {
            run.write(SUMMARY_JSON, &json(&summary), Some(&json(&fixed)))?;
            run.write(SUMMARY_CSV, summary.to_csv().as_bytes(), Some(fixed.to_csv().as_bytes()))
        })?;
        Ok(summary)
    }
}

/// Resolve the configuration, or record the failure in a manifest at the
/// configured output directory.
fn start(cfg: &RunConfig) -> Result<Run> {
    match cfg.resolve().stage(Stage::Config) {
        Ok(resolved) => Ok(Run::new(&resolved)),
        Err(e) => {
            let mut run = Run::new(cfg);
            run.manifest.stages.push(StageRecord {
                stage: Stage::Config,
                status: StageStatus::Failed,
                seconds: 0.0,
                detail: None,
            });
            run.finish(Err(e)).map(|_| unreachable!())
        }
    }
}

/// Run the configured mode. Any stage failure still writes a manifest
/// listing the completed artifacts and the error.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    let mut run = start(cfg)?;
    let result = (|| {
        let data = run.prepare()?;
        let labels: Vec<usize> = data.labeled.iter().map(|i| i.label.expect("labeled pool")).collect();
        let features: Vec<Vec<f64>> = match run.cfg.mode {
            Mode::Sshad => {
                let dict = run.learn(&data.unlabeled)?;
                run.transform(&data.labeled, &dict)?.iter().map(SparseCode::to_dense).collect()
            }
            Mode::HadBaseline => {
                run.skip(Stage::LearnDictionary, "had_baseline mode uses raw features");
                run.skip(Stage::Transform, "had_baseline mode uses raw features");
                data.labeled.iter().map(|i| i.features.clone()).collect()
            }
        };
        run.evaluate(&features, &labels, data.schema.n_classes())?;
        Ok(())
    })();
    run.finish(result)
}

pub fn run_sshad(cfg: &RunConfig) -> Result<Manifest> {
    run(&RunConfig { mode: Mode::Sshad, ..cfg.clone() })
}

pub fn run_had_baseline(cfg: &RunConfig) -> Result<Manifest> {
    run(&RunConfig { mode: Mode::HadBaseline, ..cfg.clone() })
}

/// Data preparation, dictionary learning and re-encoding of the labeled
/// pool, without evaluation: writes `dictionary.bin`, `codes.csv` and a
/// manifest.
pub fn learn_dict(cfg: &RunConfig) -> Result<Manifest> {
    let mut run = start(&RunConfig { mode: Mode::Sshad, ..cfg.clone() })?;
    run.manifest.ignored = vec!["tree".into(), "sampling_ratios".into(), "folds".into()];
    let result = (|| {
        let data = run.prepare()?;
        let dict = run.learn(&data.unlabeled)?;
        let codes = run.transform(&data.labeled, &dict)?;
        let labeled: Vec<(SparseCode, usize)> = codes
            .into_iter()
            .zip(&data.labeled)
            .map(|(c, i)| (c, i.label.expect("labeled pool")))
            .collect();
        run.step(Stage::Write, |run| run.write(CODES_FILE, &encode_codes_csv(&labeled), None))
    })();
    run.finish(result)
}

fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST)
    } else {
        path.to_path_buf()
    }
}

/// Recompute every artifact hash listed in a run's manifest. Returns the
/// number of verified files.
pub fn verify_manifest(path: &Path) -> Result<usize> {
    let manifest_file = manifest_path(path);
    let manifest = Manifest::load(&manifest_file)?;
    let dir = manifest_file.parent().unwrap_or(Path::new("."));
    for a in &manifest.artifacts {
        let bytes = read_file(&dir.join(&a.path))?;
        let actual = sha256_hex(&bytes);
        if actual != a.sha256 {
            return Err(Error::Integrity(format!("{}: expected sha256 {}, found {actual}", a.path, a.sha256)));
        }
    }
    Ok(manifest.artifacts.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub ratio: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub kappa_diff: f64,
    pub accuracy_a: f64,
    pub accuracy_b: f64,
    pub accuracy_diff: f64,
    pub time_a: f64,
    pub time_b: f64,
    pub time_diff: f64,
    pub ram_hours_a: f64,
    pub ram_hours_b: f64,
    pub ram_hours_diff: f64,
}

/// Fold-averaged metrics of two runs side by side; differences are
/// `a - b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub mode_a: String,
    pub mode_b: String,
    pub folds: usize,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "ratio,kappa_a,kappa_b,kappa_diff,accuracy_a,accuracy_b,accuracy_diff,time_a,time_b,time_diff,ram_hours_a,ram_hours_b,ram_hours_diff\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.ratio,
                r.kappa_a,
                r.kappa_b,
                r.kappa_diff,
                r.accuracy_a,
                r.accuracy_b,
                r.accuracy_diff,
                r.time_a,
                r.time_b,
                r.time_diff,
                r.ram_hours_a,
                r.ram_hours_b,
                r.ram_hours_diff
            )
            .unwrap();
        }
        out
    }

    pub fn write(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        write_file(csv_path, self.to_csv().as_bytes())?;
        write_file(json_path, &serde_json::to_vec_pretty(self).expect("comparison is serializable"))
    }
}

pub fn compare_summaries(a: &Summary, b: &Summary) -> Result<Comparison> {
    let grid = |s: &Summary| s.rows.iter().map(|r| (ratio_key(r.ratio), r.folds)).collect::<Vec<_>>();
    let (mut ga, mut gb) = (grid(a), grid(b));
    ga.sort_unstable();
    gb.sort_unstable();
    if ga != gb {
        return Err(Error::Compare(format!("ratio/fold grids differ: {ga:?} vs {gb:?}")));
    }
    let mut rows = Vec::new();
    for ra in &a.rows {
        let rb = b.rows.iter().find(|r| ratio_key(r.ratio) == ratio_key(ra.ratio)).expect("same grid");
        rows.push(ComparisonRow {
            ratio: ra.ratio,
            kappa_a: ra.kappa.mean,
            kappa_b: rb.kappa.mean,
            kappa_diff: ra.kappa.mean - rb.kappa.mean,
            accuracy_a: ra.accuracy.mean,
            accuracy_b: rb.accuracy.mean,
            accuracy_diff: ra.accuracy.mean - rb.accuracy.mean,
            time_a: ra.elapsed_seconds.mean,
            time_b: rb.elapsed_seconds.mean,
            time_diff: ra.elapsed_seconds.mean - rb.elapsed_seconds.mean,
            ram_hours_a: ra.ram_hours.mean,
            ram_hours_b: rb.ram_hours.mean,
            ram_hours_diff: ra.ram_hours.mean - rb.ram_hours.mean,
        });
    }
    rows.sort_by(|x, y| x.ratio.total_cmp(&y.ratio));
    Ok(Comparison {
        mode_a: a.mode.clone(),
        mode_b: b.mode.clone(),
        folds: a.rows.first().map_or(0, |r| r.folds),
        rows,
    })
}

/// Compare two runs given their manifests (or run directories).
pub fn compare_runs(a: &Path, b: &Path) -> Result<Comparison> {
    let load = |p: &Path| -> Result<Summary> {
        let manifest_file = manifest_path(p);
        let manifest = Manifest::load(&manifest_file)?;
        if let Some(e) = &manifest.error {
            return Err(Error::Compare(format!("{} records a failed run: {e}", manifest_file.display())));
        }
        Summary::load(&manifest_file.parent().unwrap_or(Path::new(".")).join(SUMMARY_JSON))
    };
    compare_summaries(&load(a)?, &load(b)?)
}
