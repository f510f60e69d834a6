use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use perskern::kernels::{gram, KernelKind};
use perskern::svm::SavedModel;
use perskern::KernelSpec;
use perskern_bench::config::{ExperimentConfig, PSSK_SWEEP};
use perskern_bench::data::{generate_orbits, save_point_clouds};
use perskern_bench::grams::{candidates, describe};
use perskern_bench::protocol::{metric_for, run_once, run_prepared, split_for_run, Prepared};
use perskern_bench::sweep::sweep_conditioning;
use perskern_bench::{BenchError, Result};

/// Persistence-diagram kernels: datasets, Gram matrices, SVM training and
/// the benchmark protocol.
#[derive(Parser)]
#[command(name = "perskern", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write linked twisted map orbits as point-cloud CSVs plus a manifest.
    GenerateOrbits {
        /// Map parameters, one class each.
        #[arg(long, value_delimiter = ',', default_values_t = [2.5, 3.5, 4.0, 4.1, 4.3])]
        r: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        orbits: usize,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute (or reuse) the diagrams of a configured dataset.
    Diagrams(Common),
    /// Gram matrix of one kernel over the whole dataset, as CSV.
    Gram {
        #[command(flatten)]
        common: Common,
        /// Kernel as JSON, e.g. '{"kernel":"PSSK","sigma":0.1}'.
        #[arg(long, conflicts_with = "kind")]
        kernel: Option<String>,
        /// Kernel family; takes the first value of each grid parameter.
        #[arg(long)]
        kind: Option<KernelKind>,
        /// Output file [default: <output>/gram-<kind>.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search and refit on one split; saves the model as text.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kind: KernelKind,
        /// Which split of the protocol to use.
        #[arg(long, default_value_t = 0)]
        run: usize,
        /// Model file [default: <output>/model-<kind>.txt].
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Full protocol; writes results.csv and results.json.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Restrict to these kernels.
        #[arg(long, value_delimiter = ',')]
        kernels: Vec<KernelKind>,
    },
    /// Condition number and CV score along one kernel parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Overrides the [sweep] section.
        #[arg(long)]
        kind: Option<KernelKind>,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        jitter: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of random train/test splits.
    #[arg(long)]
    runs: Option<usize>,
    /// Cross-validation folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Base seed for splits and folds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(o) = &self.output {
            cfg.output = o.clone();
        }
        let p = &mut cfg.protocol;
        p.runs = self.runs.unwrap_or(p.runs);
        p.folds = self.folds.unwrap_or(p.folds);
        p.seed = self.seed.unwrap_or(p.seed);
        p.test_fraction = self.test_fraction.unwrap_or(p.test_fraction);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn log(msg: &str) {
    eprintln!("{msg}");
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
    }
    std::fs::write(path, text).map_err(BenchError::io(path))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenerateOrbits {
            r,
            orbits,
            points,
            seed,
            out,
        } => {
            let ds = generate_orbits(&r, orbits, points, seed)?;
            let manifest = save_point_clouds(&ds, &out)?;
            println!("{} orbits -> {}", ds.len(), manifest.display());
        }
        Command::Diagrams(common) => {
            let cfg = common.load()?;
            let data = Prepared::load(&cfg)?;
            let points: usize = data.diagrams.iter().map(|d| d.len()).sum();
            println!(
                "{} diagrams ({points} points) in {}",
                data.diagrams.len(),
                cfg.output.join("diagrams").display()
            );
        }
        Command::Gram {
            common,
            kernel,
            kind,
            out,
        } => {
            let cfg = common.load()?;
            let data = Prepared::load(&cfg)?;
            let spec: KernelSpec = match (kernel, kind) {
                (Some(json), _) => serde_json::from_str(&json)
                    .map_err(|e| BenchError::Config(format!("--kernel: {e}")))?,
                (None, Some(kind)) => {
                    let all: Vec<usize> = (0..data.diagrams.len()).collect();
                    candidates(kind, &cfg.kernels, &data.diagrams, &all)?.swap_remove(0)
                }
                (None, None) => {
                    return Err(BenchError::Config("gram needs --kernel or --kind".into()))
                }
            };
            let g = gram(&data.diagrams, &spec)?;
            let out = out.unwrap_or_else(|| {
                cfg.output
                    .join(format!("gram-{}.csv", spec.kind().name().to_lowercase()))
            });
            write(&out, &g.to_csv())?;
            println!(
                "{} ({}) {}x{} -> {}",
                spec.kind(),
                describe(&spec),
                g.len(),
                g.len(),
                out.display()
            );
        }
        Command::Train {
            common,
            kind,
            run,
            model,
        } => {
            let cfg = common.load()?;
            let data = Prepared::load(&cfg)?;
            let store = data.store(Some(&cfg.output))?;
            let metric = metric_for(cfg.protocol.metric, &data.labels);
            let (train, test) = split_for_run(&cfg.protocol, &data.labels, run)?;
            let out = run_once(&store, kind, &cfg, &data.labels, &train, &test, metric, run)?;
            let saved = SavedModel {
                kernel: Some(out.best.kernel.clone()),
                train_ids: train.iter().map(|&i| data.ids[i].clone()).collect(),
                model: out.model,
            };
            let path = model.unwrap_or_else(|| {
                cfg.output
                    .join(format!("model-{}.txt", kind.name().to_lowercase()))
            });
            write(&path, &saved.to_text()?)?;
            println!(
                "{kind} {} C={}: cv {:.4}, test {:.4} ({metric:?}) -> {}",
                describe(&out.best.kernel),
                out.best.c,
                out.best.cv_score,
                out.test_score,
                path.display()
            );
        }
        Command::Bench { common, kernels } => {
            let cfg = common.load()?;
            let kinds = if kernels.is_empty() {
                cfg.kernels.kinds()
            } else {
                kernels
            };
            if kinds.is_empty() {
                return Err(BenchError::Config("no kernels configured".into()));
            }
            let data = Prepared::load(&cfg)?;
            log(&format!("{} diagrams ready", data.diagrams.len()));
            let store = data.store(Some(&cfg.output))?;
            let table = run_prepared(&cfg, &data, &store, &kinds, log)?;
            let (csv, json) = table.write(&cfg.output)?;
            for r in &table.rows {
                println!(
                    "{:5} {:.4} ± {:.4}  ({:.1}s)",
                    r.kernel, r.mean, r.std, r.seconds
                );
            }
            println!("-> {} {}", csv.display(), json.display());
        }
        Command::Sweep {
            common,
            kind,
            values,
            jitter,
        } => {
            let cfg = common.load()?;
            let section = cfg.sweep.clone();
            let kind = kind
                .or(section.as_ref().map(|s| s.kernel))
                .unwrap_or(KernelKind::ScaleSpace);
            let values = if !values.is_empty() {
                values
            } else if let Some(s) = section.as_ref().filter(|s| s.kernel == kind) {
                s.values.clone()
            } else {
                PSSK_SWEEP.to_vec()
            };
            let jitter = jitter.or(section.map(|s| s.jitter)).unwrap_or(0.0);
            let data = Prepared::load(&cfg)?;
            let store = data.store(Some(&cfg.output))?;
            let table = sweep_conditioning(&cfg, &data, &store, kind, &values, jitter)?;
            let (csv, _) = table.write(&cfg.output)?;
            print!("{}", table.to_csv());
            println!("-> {}", csv.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
