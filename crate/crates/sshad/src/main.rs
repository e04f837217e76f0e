use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sshad::config::{Mode, RunConfig, Timing};
use sshad::error::{Error, Result, Stage};
use sshad::io::{write_file, Format};
use sshad::pipeline::{self, Manifest};
use sshad::sshad_core::eval::{gen_stream, StreamSpec};

#[derive(Parser)]
#[command(name = "sshad", version, about = "Semi-supervised streaming event classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a dictionary from the unlabeled pool and re-encode the labeled
    /// pool (dictionary.bin, codes.csv).
    LearnDict(RunArgs),
    /// Dictionary learning, sparse re-encoding and tree evaluation.
    RunSshad(RunArgs),
    /// Tree evaluation on the normalized raw features.
    RunHad(RunArgs),
    /// Compare the fold-averaged metrics of two runs.
    Compare {
        /// Manifest or run directory of the first run.
        a: PathBuf,
        /// Manifest or run directory of the second run.
        b: PathBuf,
        /// Directory for comparison.csv and comparison.json.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic stream as CSV.
    GenStream(StreamArgs),
    /// Check every artifact of a run against the hashes in its manifest.
    Verify {
        /// Manifest or run directory.
        run: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run configuration; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    labeled: Option<PathBuf>,
    #[arg(long)]
    unlabeled: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Comma-separated class names, in index order.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    #[arg(long)]
    labeled_fraction: Option<f64>,
    #[arg(long)]
    unlabeled_limit: Option<usize>,
    /// Comma-separated sampling ratios.
    #[arg(long, value_delimiter = ',')]
    sampling_ratios: Option<Vec<f64>>,
    #[arg(long)]
    bad_data_fraction: Option<f64>,
    #[arg(long)]
    atoms: Option<usize>,
    /// OMP sparsity.
    #[arg(long)]
    k: Option<usize>,
    /// OMP residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    grace_period: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long, value_enum)]
    timing: Option<Timing>,
    #[arg(long)]
    parallel: Option<bool>,
    #[arg(long)]
    save_models: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, mode: Mode) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        cfg.mode = mode;
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$($field).+ = v; })*
            };
        }
        set! {
            labeled => labeled,
            labeled_fraction => labeled_fraction,
            sampling_ratios => sampling_ratios,
            bad_data_fraction => bad_data_fraction,
            atoms => dictionary.atoms,
            k => dictionary.k,
            tol => dictionary.tol,
            max_iter => dictionary.max_iter,
            grace_period => tree.grace_period,
            folds => folds,
            seed => seed,
            snapshot_every => snapshot_every,
            timing => timing,
            parallel => parallel,
            output => output,
        }
        if self.unlabeled.is_some() {
            cfg.unlabeled = self.unlabeled;
        }
        if self.format.is_some() {
            cfg.format = self.format;
        }
        if self.classes.is_some() {
            cfg.classes = self.classes;
        }
        if self.unlabeled_limit.is_some() {
            cfg.unlabeled_limit = self.unlabeled_limit;
        }
        if self.save_models {
            cfg.save_models = true;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct StreamArgs {
    /// TOML or JSON stream specification; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// hyperplane, inversion or bernoulli.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    drift_points: Option<Vec<usize>>,
    #[arg(long)]
    class_balance: Option<f64>,
    #[arg(long)]
    n_features: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long, short)]
    output: PathBuf,
}

fn stream_spec(args: &StreamArgs) -> Result<StreamSpec> {
    let mut spec: StreamSpec = match &args.config {
        Some(path) => {
            let text = String::from_utf8(sshad::io::read_file(path)?)
                .map_err(|e| Error::format(path, e.to_string()))?;
            if path.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?
            } else {
                toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?
            }
        }
        None => StreamSpec::default(),
    };
    if let Some(v) = &args.generator {
        spec.generator = v.clone();
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.length {
        spec.length = v;
    }
    if let Some(v) = &args.drift_points {
        spec.drift_points = v.clone();
    }
    if let Some(v) = args.class_balance {
        spec.class_balance = v;
    }
    if let Some(v) = args.n_features {
        spec.n_features = v;
    }
    if let Some(v) = &args.rates {
        spec.rates = v.clone();
    }
    Ok(spec)
}

fn write_stream(args: &StreamArgs) -> Result<usize> {
    let spec = stream_spec(args)?;
    let items = gen_stream(&spec)?;
    let mut out = String::new();
    if spec.generator == "bernoulli" {
        out.push_str("error\n");
        for (_, e) in &items {
            writeln!(out, "{e}").unwrap();
        }
    } else {
        let names: Vec<String> = (0..spec.n_features).map(|i| format!("x{i}")).collect();
        writeln!(out, "{},class", names.join(",")).unwrap();
        for (x, y) in &items {
            for v in x {
                write!(out, "{v:.16e},").unwrap();
            }
            writeln!(out, "{y}").unwrap();
        }
    }
    write_file(&args.output, out.as_bytes())?;
    Ok(items.len())
}

fn describe(manifest: &Manifest, dir: &Path) {
    println!("{} run written to {}", manifest.mode, dir.display());
    if let Ok(summary) = pipeline::Summary::load(&dir.join(pipeline::SUMMARY_JSON)) {
        for r in &summary.rows {
            println!(
                "ratio {:.2}: kappa {:.4} +/- {:.4}, accuracy {:.4}, {:.3} s, {:.3e} GB-h",
                r.ratio, r.kappa.mean, r.kappa.std, r.accuracy.mean, r.elapsed_seconds.mean, r.ram_hours.mean
            );
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::LearnDict(args) => {
            let cfg = args.into_config(Mode::Sshad).map_err(|e| tag(e, Stage::Config))?;
            let m = pipeline::learn_dict(&cfg)?;
            println!("dictionary written to {}", cfg.output.join(pipeline::DICTIONARY_FILE).display());
            if let Some(last) = m.dictionary_iterations.last() {
                println!("{} iterations, final objective {:.6e}", m.dictionary_iterations.len(), last.objective_after);
            }
        }
        Command::RunSshad(args) => {
            let cfg = args.into_config(Mode::Sshad).map_err(|e| tag(e, Stage::Config))?;
            describe(&pipeline::run(&cfg)?, &cfg.output);
        }
        Command::RunHad(args) => {
            let cfg = args.into_config(Mode::HadBaseline).map_err(|e| tag(e, Stage::Config))?;
            describe(&pipeline::run(&cfg)?, &cfg.output);
        }
        Command::Compare { a, b, output } => {
            let cmp = pipeline::compare_runs(&a, &b)?;
            match output {
                Some(dir) => cmp.write(&dir.join("comparison.csv"), &dir.join("comparison.json"))?,
                None => print!("{}", cmp.to_csv()),
            }
        }
        Command::GenStream(args) => {
            let n = write_stream(&args)?;
            println!("{n} instances written to {}", args.output.display());
        }
        Command::Verify { run } => {
            let n = pipeline::verify_manifest(&run)?;
            println!("{n} artifacts verified");
        }
    }
    Ok(())
}

fn tag(e: Error, stage: Stage) -> Error {
    if e.stage().is_some() {
        e
    } else {
        Error::Stage { stage, source: Box::new(e) }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
