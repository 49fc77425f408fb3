use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bessel::BesselRootTable;
use crate::dataset::{load_dataset_dir, save_pgm, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    cmc_from_ranks, curve_csv, equal_error_rate, error_rate, learning_curve, mean_and_sem, per_feature_error_map,
    random_split, run_error_experiment, subject_curve, summary_csv, true_ranks, verification_roc,
    verification_scores, ErrorReport, Recognizer, ScoreMatrix, SplitSpec, SummaryRow,
};
use crate::features::{synth_angular, synth_mix, synth_oracle, synth_radial, write_feature_csv, FbtConfig};
use crate::image::GrayImage;
use crate::io::write_atomic;
use crate::pipeline::{extract_dataset, ExtractedFeatures, FeatureMode};
use crate::toy::{toy_dataset, ToySpec};

use super::config::{ExperimentKind, RunConfig};

/// Files written by a command and the lines it reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

/// Runs `f` on a pool of `workers` threads (0: one per core).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

struct Outputs {
    dir: PathBuf,
    hash: String,
    out: CommandOutput,
}

impl Outputs {
    fn new(cfg: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| Error::io(format!("creating output directory {}", cfg.out.display()), e))?;
        Ok(Outputs {
            dir: cfg.out.clone(),
            hash: cfg.config_hash(),
            out: CommandOutput::default(),
        })
    }

    fn write(&mut self, stem: &str, ext: &str, text: &str) -> Result<()> {
        let path = self.dir.join(format!("{stem}_{}.{ext}", self.hash));
        write_atomic(&path, text.as_bytes())?;
        self.out.files.push(path);
        Ok(())
    }

    fn line(&mut self, line: String) {
        self.out.lines.push(line);
    }
}

fn load(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("no dataset configured (set [dataset] path or --dataset)".into()))?;
    load_dataset_dir(path, cfg.layout)
}

fn extract(cfg: &RunConfig, dataset: &Dataset) -> Result<ExtractedFeatures> {
    extract_dataset(dataset, cfg.mode, &cfg.extractor())
}

/// Reads the dataset, optionally normalizes, and writes one feature file
/// per feature type of the configured mode.
pub fn cmd_extract(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let dataset = load(cfg)?;
    let features = extract(cfg, &dataset)?;
    let mut out = Outputs::new(cfg)?;
    let kinds: &[FeatureMode] = match cfg.mode {
        FeatureMode::Fused => &[FeatureMode::Fbt, FeatureMode::Dft],
        FeatureMode::Fbt => &[FeatureMode::Fbt],
        FeatureMode::Dft => &[FeatureMode::Dft],
    };
    for &kind in kinds {
        let records = features.records(kind)?;
        let width = records.first().map_or(0, |r| r.features.len());
        out.write(&format!("features_{kind}"), "csv", &write_feature_csv(&records)?)?;
        out.line(format!("{kind} {} images x {width} values", records.len()));
    }
    out.write("run_config", "ini", &cfg.to_ini_with(false))?;
    Ok(out.out)
}

fn scored_repetitions(
    subjects: &[String],
    recognizer: &dyn Recognizer,
    spec: &SplitSpec,
) -> Result<Vec<(Vec<usize>, ScoreMatrix)>> {
    spec.validate()?;
    (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            let split = random_split(subjects, spec, rep)?;
            let scores = recognizer.score(subjects, &split.train, &split.test)?;
            Ok((split.test, scores))
        })
        .collect()
}

fn repetition_errors(subjects: &[String], runs: &[(Vec<usize>, ScoreMatrix)]) -> ErrorReport {
    ErrorReport::from_errors(
        runs.iter()
            .map(|(test, scores)| error_rate(&scores.predictions(), subjects, test))
            .collect(),
    )
}

fn truth_of<'a>(subjects: &'a [String], test: &[usize]) -> Vec<&'a str> {
    test.iter().map(|&i| subjects[i].as_str()).collect()
}

fn curve_lines(out: &mut Outputs, label: &str, id: &str, points: &[(usize, ErrorReport)], rows: &mut Vec<SummaryRow>) {
    for (k, r) in points {
        out.line(format!("{label} {k} error {:.3} sem {:.3}", r.mean, r.sem));
        rows.push(SummaryRow {
            experiment: format!("{id}-{label}{k}"),
            mean: r.mean,
            sem: r.sem,
            eer: None,
        });
    }
}

/// Runs the configured experiment and writes its report files.
pub fn cmd_experiment(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    if cfg.experiment == ExperimentKind::SynthOracle {
        return run_synth_oracle(cfg);
    }
    let dataset = load(cfg)?;
    let features = extract(cfg, &dataset)?;
    let subjects = &features.subjects;
    let mut out = Outputs::new(cfg)?;
    let id = format!("{}-{}", cfg.experiment, cfg.mode);
    let mut rows = Vec::new();

    match cfg.experiment {
        ExperimentKind::ErrorRate => {
            let recognizer = features.recognizer(cfg.mode)?;
            let r = run_error_experiment(subjects, recognizer.as_ref(), &cfg.split)?;
            out.line(format!("error {:.3} sem {:.3}", r.mean, r.sem));
            rows.push(SummaryRow {
                experiment: id,
                mean: r.mean,
                sem: r.sem,
                eer: None,
            });
        }
        ExperimentKind::LearningCurve => {
            let recognizer = features.recognizer(cfg.mode)?;
            let points = learning_curve(subjects, recognizer.as_ref(), &cfg.split, &cfg.learning_k)?;
            out.write(&format!("learning_{}", cfg.mode), "csv", &curve_csv("k", &points))?;
            curve_lines(&mut out, "k", &id, &points, &mut rows);
        }
        ExperimentKind::SubjectCurve => {
            let recognizer = features.recognizer(cfg.mode)?;
            let points = subject_curve(subjects, recognizer.as_ref(), &cfg.split, &cfg.subject_counts)?;
            out.write(&format!("subjects_{}", cfg.mode), "csv", &curve_csv("subjects", &points))?;
            curve_lines(&mut out, "subjects", &id, &points, &mut rows);
        }
        ExperimentKind::Identification => {
            let recognizer = features.recognizer(cfg.mode)?;
            let runs = scored_repetitions(subjects, recognizer.as_ref(), &cfg.split)?;
            let mut ranks = Vec::new();
            let mut gallery = 0;
            for (test, scores) in &runs {
                ranks.extend(true_ranks(scores, &truth_of(subjects, test))?);
                gallery = scores.classes.len();
            }
            let curve = cmc_from_ranks(&ranks, gallery);
            out.write(&format!("cmc_{}", cfg.mode), "csv", &curve.to_csv())?;
            let r = repetition_errors(subjects, &runs);
            out.line(format!(
                "rank1 {:.3} error {:.3} sem {:.3}",
                curve.at(1),
                r.mean,
                r.sem
            ));
            rows.push(SummaryRow {
                experiment: id,
                mean: r.mean,
                sem: r.sem,
                eer: None,
            });
        }
        ExperimentKind::Verification => {
            let recognizer = features.recognizer(cfg.mode)?;
            let runs = scored_repetitions(subjects, recognizer.as_ref(), &cfg.split)?;
            let mut genuine = Vec::new();
            let mut impostor = Vec::new();
            for (test, scores) in &runs {
                let (g, i) = verification_scores(scores, &truth_of(subjects, test), cfg.score_orientation)?;
                genuine.extend(g);
                impostor.extend(i);
            }
            let roc = verification_roc(&genuine, &impostor, cfg.score_orientation)?;
            let eer = equal_error_rate(&roc);
            out.write(&format!("roc_{}", cfg.mode), "csv", &roc.to_csv())?;
            let r = repetition_errors(subjects, &runs);
            out.line(format!(
                "eer {:.3} threshold {} bracket {} {} error {:.3} sem {:.3}",
                eer.rate, eer.threshold, eer.bracket.0, eer.bracket.1, r.mean, r.sem
            ));
            rows.push(SummaryRow {
                experiment: id,
                mean: r.mean,
                sem: r.sem,
                eer: Some(eer.rate),
            });
        }
        ExperimentKind::FeatureMap => {
            let maps = [("fbt", &features.fbt), ("dft", &features.dft)];
            for (name, set) in maps {
                let Some(set) = set else { continue };
                let map = per_feature_error_map(set, subjects, &cfg.split)?;
                out.write(&format!("featuremap_{name}"), "csv", &map.to_csv())?;
                let (mean, sem) = mean_and_sem(&map.errors);
                let best = map
                    .errors
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, &e)| (map.layout.coord(k), e));
                if let Some((coord, e)) = best {
                    out.line(format!(
                        "{name} features {} mean error {mean:.3} best {e:.3} at {coord:?}",
                        map.errors.len()
                    ));
                }
                rows.push(SummaryRow {
                    experiment: format!("feature-map-{name}"),
                    mean,
                    sem,
                    eer: None,
                });
            }
        }
        ExperimentKind::SynthOracle => unreachable!("handled above"),
    }

    out.write("summary", "csv", &summary_csv(&rows))?;
    out.write("run_config", "ini", &cfg.to_ini_with(false))?;
    Ok(out.out)
}

/// Pattern size and transform settings of the synthetic-pattern check.
pub const ORACLE_SIZE: usize = 131;

pub fn oracle_config() -> FbtConfig {
    FbtConfig {
        max_order: 30,
        max_root: 10,
        angular_resolution: 0.5,
    }
}

fn run_synth_oracle(cfg: &RunConfig) -> Result<CommandOutput> {
    let fbt = oracle_config();
    let roots = BesselRootTable::build(fbt.max_order, fbt.max_root)?;
    let checks = synth_oracle(ORACLE_SIZE, &fbt, &roots)?;
    let mut out = Outputs::new(cfg)?;
    let mut csv = String::from("check,passed,detail\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{}\n", c.name, c.passed, c.detail));
        out.line(format!(
            "{} {} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    out.write("synth_oracle", "csv", &csv)?;
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::InputDomain(format!(
            "synthetic pattern check `{}` failed: {}",
            bad.name, bad.detail
        )));
    }
    Ok(out.out)
}

/// A synthetic test pattern and its cycle counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthPattern {
    Radial(f64),
    Angular(u32),
    Mix(f64, u32),
}

impl SynthPattern {
    /// `kind` is radial, angular or mix; `cycles` is one number, or
    /// `radial,angular` for mix.
    pub fn parse(kind: &str, cycles: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad cycles `{cycles}` for {kind} pattern"));
        match kind {
            "radial" => Ok(SynthPattern::Radial(cycles.parse().map_err(|_| bad())?)),
            "angular" => Ok(SynthPattern::Angular(cycles.parse().map_err(|_| bad())?)),
            "mix" => {
                let (r, a) = cycles.split_once(',').ok_or_else(bad)?;
                Ok(SynthPattern::Mix(
                    r.trim().parse().map_err(|_| bad())?,
                    a.trim().parse().map_err(|_| bad())?,
                ))
            }
            other => Err(Error::Config(format!(
                "unknown pattern kind `{other}` (expected radial, angular or mix)"
            ))),
        }
    }

    pub fn render(&self, size: usize) -> Result<GrayImage> {
        match *self {
            SynthPattern::Radial(c) => synth_radial(c, size),
            SynthPattern::Angular(c) => synth_angular(c, size),
            SynthPattern::Mix(r, a) => synth_mix(r, a, size),
        }
    }
}

impl fmt::Display for SynthPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthPattern::Radial(c) => write!(f, "radial {c}"),
            SynthPattern::Angular(c) => write!(f, "angular {c}"),
            SynthPattern::Mix(r, a) => write!(f, "mix {r},{a}"),
        }
    }
}

impl FromStr for SynthPattern {
    type Err = Error;

    /// `kind:cycles`, e.g. `mix:8,4`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, cycles) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected kind:cycles, got `{s}`")))?;
        Self::parse(kind, cycles)
    }
}

fn to_8bit(image: &GrayImage) -> Result<GrayImage> {
    GrayImage::new(
        image.width(),
        image.height(),
        image.pixels().iter().map(|p| p * 255.0).collect(),
    )
}

/// Writes a `[0, 1]` pattern as an 8-bit P5 graymap.
pub fn cmd_synth(pattern: SynthPattern, size: usize, out: &Path) -> Result<()> {
    save_pgm(&to_8bit(&pattern.render(size)?)?, 255, out)
}

/// Writes a toy dataset as a one-directory-per-subject tree of 8-bit P5
/// files.
pub fn cmd_synth_dataset(spec: &ToySpec, out: &Path) -> Result<CommandOutput> {
    let dataset = toy_dataset(spec)?;
    let mut result = CommandOutput::default();
    for entry in dataset.entries() {
        let path = out.join(&entry.image_id);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        }
        save_pgm(&to_8bit(&entry.load_image()?)?, 255, &path)?;
        result.files.push(path);
    }
    result.lines.push(format!(
        "{} subjects x {} images written to {}",
        spec.subjects,
        spec.images_per_subject,
        out.display()
    ));
    Ok(result)
}
