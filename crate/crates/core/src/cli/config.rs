//! Run configuration: a line-oriented `key = value` file with `[section]`
//! headers, overridable from the command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::dataset::{DatasetLayout, EllipseMask, NormalizationConfig};
use crate::error::{Error, Result};
use crate::eval::{ScoreOrientation, SplitSpec};
use crate::features::{DftConfig, FbtConfig};
use crate::pipeline::{ExtractorConfig, FeatureMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExperimentKind {
    #[default]
    ErrorRate,
    LearningCurve,
    SubjectCurve,
    Identification,
    Verification,
    FeatureMap,
    SynthOracle,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::ErrorRate,
        ExperimentKind::LearningCurve,
        ExperimentKind::SubjectCurve,
        ExperimentKind::Identification,
        ExperimentKind::Verification,
        ExperimentKind::FeatureMap,
        ExperimentKind::SynthOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ErrorRate => "error-rate",
            ExperimentKind::LearningCurve => "learning-curve",
            ExperimentKind::SubjectCurve => "subject-curve",
            ExperimentKind::Identification => "identification",
            ExperimentKind::Verification => "verification",
            ExperimentKind::FeatureMap => "feature-map",
            ExperimentKind::SynthOracle => "synth-oracle",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown experiment `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: FeatureMode,
    pub experiment: ExperimentKind,
    pub dataset: Option<PathBuf>,
    pub layout: DatasetLayout,
    pub fbt: FbtConfig,
    pub dft: DftConfig,
    pub split: SplitSpec,
    pub learning_k: Vec<usize>,
    pub subject_counts: Vec<usize>,
    pub normalize: bool,
    pub normalization: NormalizationConfig,
    pub out: PathBuf,
    /// Worker threads; 0 picks the number of cores.
    pub workers: usize,
    pub score_orientation: ScoreOrientation,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: FeatureMode::Fbt,
            experiment: ExperimentKind::ErrorRate,
            dataset: None,
            layout: DatasetLayout::Orl,
            fbt: FbtConfig::default(),
            dft: DftConfig::default(),
            split: SplitSpec::default(),
            learning_k: vec![1, 2, 3, 4, 5],
            subject_counts: vec![10, 20, 30, 40],
            normalize: false,
            normalization: NormalizationConfig::default(),
            out: PathBuf::from("out"),
            workers: 0,
            score_orientation: ScoreOrientation::Distance,
        }
    }
}

fn list<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}`", v.trim())))
        })
        .collect()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    match parse_list::<f64>(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Config(format!("`{key}` expects two numbers, got `{value}`"))),
    }
}

impl RunConfig {
    pub fn extractor(&self) -> ExtractorConfig {
        ExtractorConfig {
            fbt: self.fbt,
            dft: self.dft,
            normalization: self.normalize.then_some(self.normalization),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fbt.validate()?;
        self.dft.validate()?;
        self.split.validate()?;
        if self.normalize {
            self.normalization.validate()?;
        }
        if self.learning_k.contains(&0) || self.subject_counts.contains(&0) {
            return Err(Error::Config("curve points must be at least 1".into()));
        }
        Ok(())
    }

    /// Serializes the configuration. Runtime-only settings (output
    /// directory and worker count) are written only when `runtime` is set.
    pub fn to_ini_with(&self, runtime: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "score_orientation = {}", self.score_orientation);
        if runtime {
            let _ = writeln!(s, "out = {}", self.out.display());
            let _ = writeln!(s, "workers = {}", self.workers);
        }
        let _ = writeln!(s, "\n[dataset]");
        let _ = writeln!(
            s,
            "path = {}",
            self.dataset.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
        );
        let _ = writeln!(s, "layout = {}", self.layout);
        let _ = writeln!(s, "\n[fbt]");
        let _ = writeln!(s, "max_order = {}", self.fbt.max_order);
        let _ = writeln!(s, "max_root = {}", self.fbt.max_root);
        let _ = writeln!(s, "angular_resolution = {}", self.fbt.angular_resolution);
        let _ = writeln!(s, "\n[dft]");
        let _ = writeln!(s, "max_cycles = {}", self.dft.max_cycles);
        let _ = writeln!(s, "\n[split]");
        let _ = writeln!(s, "k_train = {}", self.split.k_train_per_subject);
        let _ = writeln!(
            s,
            "subjects = {}",
            self.split.n_subjects.map(|n| n.to_string()).unwrap_or_default()
        );
        let _ = writeln!(s, "repetitions = {}", self.split.repetitions);
        let _ = writeln!(s, "seed = {}", self.split.seed);
        let _ = writeln!(s, "\n[curves]");
        let _ = writeln!(s, "learning_k = {}", list(&self.learning_k));
        let _ = writeln!(s, "subject_counts = {}", list(&self.subject_counts));
        let n = &self.normalization;
        let _ = writeln!(s, "\n[normalization]");
        let _ = writeln!(s, "enabled = {}", self.normalize);
        let _ = writeln!(s, "left_eye = {},{}", n.target_left_eye.0, n.target_left_eye.1);
        let _ = writeln!(s, "right_eye = {},{}", n.target_right_eye.0, n.target_right_eye.1);
        let _ = writeln!(s, "crop = {},{}", n.crop_width, n.crop_height);
        match &n.mask {
            Some(m) => {
                let _ = writeln!(
                    s,
                    "mask = {},{},{},{}",
                    m.center.0, m.center.1, m.semi_axes.0, m.semi_axes.1
                );
            }
            None => {
                let _ = writeln!(s, "mask = none");
            }
        }
        s
    }

    pub fn to_ini(&self) -> String {
        self.to_ini_with(true)
    }

    /// First 12 hex digits of the SHA-256 of the runtime-free configuration.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.to_ini_with(false).as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// Applies a configuration file on top of `self`. Unknown sections or
    /// keys are errors.
    pub fn apply_ini(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        let mut seen = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let at = |e: Error| Error::Config(format!("line {line_no}: {e}"));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(Error::Config(format!("expected `key = value`, got `{line}`"))))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = seen.insert(format!("{section}.{key}"), line_no) {
                return Err(at(Error::Config(format!(
                    "`{section}.{key}` already set on line {prev}"
                ))));
            }
            self.set(&section, key, value).map_err(at)?;
        }
        Ok(())
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let full = format!("{section}.{key}");
        let k = full.as_str();
        match k {
            "run.mode" => self.mode = value.parse()?,
            "run.experiment" => self.experiment = value.parse()?,
            "run.score_orientation" => self.score_orientation = value.parse()?,
            "run.out" => self.out = PathBuf::from(value),
            "run.workers" => self.workers = parse_value(k, value)?,
            "dataset.path" => {
                self.dataset = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "dataset.layout" => self.layout = value.parse()?,
            "fbt.max_order" => self.fbt.max_order = parse_value(k, value)?,
            "fbt.max_root" => self.fbt.max_root = parse_value(k, value)?,
            "fbt.angular_resolution" => self.fbt.angular_resolution = parse_value(k, value)?,
            "dft.max_cycles" => self.dft.max_cycles = parse_value(k, value)?,
            "split.k_train" => self.split.k_train_per_subject = parse_value(k, value)?,
            "split.subjects" => {
                self.split.n_subjects = if value.is_empty() {
                    None
                } else {
                    Some(parse_value(k, value)?)
                };
            }
            "split.repetitions" => self.split.repetitions = parse_value(k, value)?,
            "split.seed" => self.split.seed = parse_value(k, value)?,
            "curves.learning_k" => self.learning_k = parse_list(k, value)?,
            "curves.subject_counts" => self.subject_counts = parse_list(k, value)?,
            "normalization.enabled" => self.normalize = parse_value(k, value)?,
            "normalization.left_eye" => self.normalization.target_left_eye = parse_pair(k, value)?,
            "normalization.right_eye" => self.normalization.target_right_eye = parse_pair(k, value)?,
            "normalization.crop" => match parse_list::<usize>(k, value)?.as_slice() {
                [w, h] => {
                    self.normalization.crop_width = *w;
                    self.normalization.crop_height = *h;
                }
                _ => return Err(Error::Config(format!("`{k}` expects width,height"))),
            },
            "normalization.mask" => {
                self.normalization.mask = if value == "none" {
                    None
                } else {
                    match parse_list::<f64>(k, value)?.as_slice() {
                        [cx, cy, a, b] => Some(EllipseMask {
                            center: (*cx, *cy),
                            semi_axes: (*a, *b),
                        }),
                        _ => {
                            return Err(Error::Config(format!(
                                "`{k}` expects cx,cy,a,b or none"
                            )))
                        }
                    }
                };
            }
            _ => return Err(Error::Config(format!("unknown setting `{k}`"))),
        }
        Ok(())
    }

    pub fn from_ini(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_ini(text)?;
        Ok(cfg)
    }
}
