use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use polarface::bessel::BesselRootTable;
use polarface::classifier::{classify, load_model, save_model, train_pfld};
use polarface::cli::{
    cmd_experiment, cmd_extract, cmd_synth, cmd_synth_dataset, with_workers, CommandOutput, ExperimentKind,
    RunConfig, SynthPattern,
};
use polarface::dataset::{load_pgm, DatasetLayout};
use polarface::eval::ScoreOrientation;
use polarface::features::parse_feature_csv;
use polarface::io::write_atomic;
use polarface::pipeline::FeatureMode;
use polarface::polar::to_polar;
use polarface::toy::ToySpec;

#[derive(Parser)]
#[command(name = "polarface", version, about = "Polar-frequency face recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature files from a dataset.
    Extract(RunArgs),
    /// Run an evaluation experiment and write its reports.
    Experiment {
        #[command(flatten)]
        run: RunArgs,
        /// error-rate, learning-curve, subject-curve, identification,
        /// verification, feature-map or synth-oracle
        #[arg(long)]
        experiment: Option<ExperimentKind>,
    },
    /// Write a synthetic test pattern as an 8-bit graymap.
    Synth {
        /// radial, angular or mix
        kind: String,
        /// Cycle count; `radial,angular` for mix
        cycles: String,
        size: usize,
        out: PathBuf,
    },
    /// Write a toy labeled dataset as one directory per subject.
    SynthDataset {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        subjects: usize,
        #[arg(long, default_value_t = 10)]
        images: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Dump the Bessel root table.
    Roots {
        #[arg(long, default_value_t = 30)]
        max_order: usize,
        #[arg(long, default_value_t = 3)]
        max_root: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the polar resampling of an image, one row per ray.
    Polar {
        image: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        resolution: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a classifier on a feature file and save the model.
    Train {
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Classify every row of a feature file with a saved model.
    Classify {
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// INI run configuration; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// fbt, dft or fused
    #[arg(long)]
    mode: Option<FeatureMode>,
    /// Dataset root directory or manifest
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// orl or flat-manifest
    #[arg(long)]
    layout: Option<DatasetLayout>,
    /// Training images per subject
    #[arg(long)]
    k_train: Option<usize>,
    /// Random splits to average over
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Register faces on annotated eye centers
    #[arg(long)]
    normalize: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    workers: Option<usize>,
    /// distance or similarity
    #[arg(long)]
    score_orientation: Option<ScoreOrientation>,
}

impl RunArgs {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_ini(&text).with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = &self.dataset {
            cfg.dataset = Some(v.clone());
        }
        if let Some(v) = self.layout {
            cfg.layout = v;
        }
        if let Some(v) = self.k_train {
            cfg.split.k_train_per_subject = v;
        }
        if let Some(v) = self.reps {
            cfg.split.repetitions = v;
        }
        if let Some(v) = self.seed {
            cfg.split.seed = v;
        }
        if self.normalize {
            cfg.normalize = true;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.score_orientation {
            cfg.score_orientation = v;
        }
        Ok(cfg)
    }
}

fn report(out: CommandOutput) -> anyhow::Result<()> {
    let text: String = out.lines.iter().map(|l| format!("{l}\n")).collect();
    emit(&text, None)
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => Ok(write_atomic(path, text.as_bytes())?),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract(args) => {
            let cfg = args.resolve()?;
            let out = with_workers(cfg.workers, || cmd_extract(&cfg))?.context("extract")?;
            report(out)?;
        }
        Command::Experiment { run, experiment } => {
            let mut cfg = run.resolve()?;
            if let Some(kind) = experiment {
                cfg.experiment = kind;
            }
            let out = with_workers(cfg.workers, || cmd_experiment(&cfg))?
                .with_context(|| format!("{} experiment", cfg.experiment))?;
            report(out)?;
        }
        Command::Synth {
            kind,
            cycles,
            size,
            out,
        } => {
            let pattern = SynthPattern::parse(&kind, &cycles)?;
            cmd_synth(pattern, size, &out).with_context(|| format!("writing {pattern} pattern"))?;
        }
        Command::SynthDataset {
            out,
            subjects,
            images,
            size,
            seed,
        } => {
            let spec = ToySpec {
                subjects,
                images_per_subject: images,
                size,
                seed,
                ..ToySpec::default()
            };
            report(cmd_synth_dataset(&spec, &out)?)?;
        }
        Command::Roots {
            max_order,
            max_root,
            out,
        } => {
            let table = BesselRootTable::build(max_order, max_root)?;
            emit(&table.to_csv(), out.as_ref())?;
        }
        Command::Polar {
            image,
            resolution,
            out,
        } => {
            let img = load_pgm(&image)?;
            emit(&to_polar(&img, resolution)?.to_csv(), out.as_ref())?;
        }
        Command::Train { features, model } => {
            let text = std::fs::read_to_string(&features)
                .with_context(|| format!("reading {}", features.display()))?;
            let records = parse_feature_csv(&text).with_context(|| format!("in {}", features.display()))?;
            if records.is_empty() {
                bail!("{} holds no feature rows", features.display());
            }
            let vectors: Vec<_> = records.iter().map(|r| r.features.clone()).collect();
            let labels: Vec<&str> = records.iter().map(|r| r.subject_id.as_str()).collect();
            let trained = train_pfld(&vectors, &labels)?;
            save_model(&trained, &model)?;
            println!(
                "trained on {} images, {} classes",
                vectors.len(),
                trained.class_labels().len()
            );
        }
        Command::Classify { features, model } => {
            let trained = load_model(&model)?;
            let text = std::fs::read_to_string(&features)
                .with_context(|| format!("reading {}", features.display()))?;
            let mut table = String::from("image,predicted,score\n");
            for r in parse_feature_csv(&text)? {
                let s = classify(&trained, &r.features).with_context(|| format!("classifying {}", r.image_id))?;
                table += &format!("{},{},{}\n", r.image_id, s.predicted(), s.normalized()[s.predicted_index()]);
            }
            emit(&table, None)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
