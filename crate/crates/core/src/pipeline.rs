//! Dataset-wide feature extraction for the three recognition pipelines.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::bessel::BesselRootTable;
use crate::dataset::{normalize_face, Dataset, DatasetEntry, NormalizationConfig};
use crate::error::{Error, Result};
use crate::eval::{FusedRecognizer, PfldRecognizer, Recognizer};
use crate::features::{
    dft_features, dft_magnitude, fbt_features, DftConfig, FbtConfig, FbtPlan, FeatureRecord, FeatureVector,
};
use crate::image::GrayImage;
use crate::polar::to_polar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureMode {
    /// Fourier-Bessel coefficients
    #[default]
    Fbt,
    /// DFT magnitudes
    Dft,
    /// Both, combined by the max rule
    Fused,
}

impl FeatureMode {
    pub fn uses_fbt(self) -> bool {
        matches!(self, FeatureMode::Fbt | FeatureMode::Fused)
    }

    pub fn uses_dft(self) -> bool {
        matches!(self, FeatureMode::Dft | FeatureMode::Fused)
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fbt" => Ok(FeatureMode::Fbt),
            "dft" => Ok(FeatureMode::Dft),
            "fused" => Ok(FeatureMode::Fused),
            other => Err(Error::Config(format!(
                "unknown feature mode `{other}` (expected fbt, dft or fused)"
            ))),
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Fbt => "fbt",
            FeatureMode::Dft => "dft",
            FeatureMode::Fused => "fused",
        })
    }
}

/// Per-image preprocessing and feature settings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtractorConfig {
    pub fbt: FbtConfig,
    pub dft: DftConfig,
    /// Register faces on their annotated eyes before extraction.
    pub normalization: Option<NormalizationConfig>,
}

/// Computes features image by image, sharing one transform plan per image
/// size.
#[derive(Debug)]
pub struct FeatureExtractor {
    config: ExtractorConfig,
    roots: Option<BesselRootTable>,
    plans: Mutex<HashMap<(usize, usize), Arc<FbtPlan>>>,
}

impl FeatureExtractor {
    pub fn new(config: ExtractorConfig, mode: FeatureMode) -> Result<Self> {
        config.fbt.validate()?;
        config.dft.validate()?;
        if let Some(n) = &config.normalization {
            n.validate()?;
        }
        let roots = if mode.uses_fbt() {
            Some(BesselRootTable::build(config.fbt.max_order, config.fbt.max_root)?)
        } else {
            None
        };
        Ok(FeatureExtractor {
            config,
            roots,
            plans: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &ExtractorConfig {
        &self.config
    }

    /// Loads an entry and applies the optional face normalization.
    pub fn prepare(&self, entry: &DatasetEntry) -> Result<GrayImage> {
        let image = entry.load_image()?;
        match &self.config.normalization {
            None => Ok(image),
            Some(cfg) => {
                let eyes = entry.eyes.as_ref().ok_or_else(|| {
                    Error::Dataset(format!(
                        "image `{}` has no eye annotations; normalization needs them",
                        entry.image_id
                    ))
                })?;
                normalize_face(&image, eyes, cfg)
            }
        }
    }

    fn plan(&self, image: &GrayImage, grid: &crate::polar::PolarGrid) -> Result<Arc<FbtPlan>> {
        let roots = self
            .roots
            .as_ref()
            .ok_or_else(|| Error::Config("extractor was built without Fourier-Bessel support".into()))?;
        let key = (image.width(), image.height());
        if let Some(plan) = self.plans.lock().expect("plan cache poisoned").get(&key) {
            return Ok(plan.clone());
        }
        let plan = Arc::new(FbtPlan::for_grid(self.config.fbt, roots, grid)?);
        self.plans
            .lock()
            .expect("plan cache poisoned")
            .entry(key)
            .or_insert(plan.clone());
        Ok(plan)
    }

    pub fn fbt(&self, image: &GrayImage) -> Result<FeatureVector> {
        let grid = to_polar(image, self.config.fbt.angular_resolution)?;
        let plan = self.plan(image, &grid)?;
        Ok(fbt_features(&plan.transform(&grid)?))
    }

    pub fn dft(&self, image: &GrayImage) -> Result<FeatureVector> {
        dft_features(&dft_magnitude(image), &self.config.dft)
    }
}

/// Features of a whole dataset, in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedFeatures {
    pub image_ids: Vec<String>,
    pub subjects: Vec<String>,
    pub fbt: Option<Vec<FeatureVector>>,
    pub dft: Option<Vec<FeatureVector>>,
}

pub fn extract_dataset(dataset: &Dataset, mode: FeatureMode, config: &ExtractorConfig) -> Result<ExtractedFeatures> {
    let extractor = FeatureExtractor::new(config.clone(), mode)?;
    let per_image = dataset
        .entries()
        .par_iter()
        .map(|entry| {
            let tag = |e: Error| match e {
                Error::Io { .. } | Error::Dataset(_) => e,
                other => Error::Dataset(format!("image `{}`: {other}", entry.image_id)),
            };
            let image = extractor.prepare(entry).map_err(tag)?;
            let f = if mode.uses_fbt() {
                Some(extractor.fbt(&image).map_err(tag)?)
            } else {
                None
            };
            let d = if mode.uses_dft() {
                Some(extractor.dft(&image).map_err(tag)?)
            } else {
                None
            };
            Ok((f, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let (fbt, dft): (Vec<_>, Vec<_>) = per_image.into_iter().unzip();
    Ok(ExtractedFeatures {
        image_ids: dataset.image_ids(),
        subjects: dataset.subject_ids(),
        fbt: fbt.into_iter().collect(),
        dft: dft.into_iter().collect(),
    })
}

impl ExtractedFeatures {
    fn require(&self, which: &str, v: &Option<Vec<FeatureVector>>) -> Result<Vec<FeatureVector>> {
        v.clone()
            .ok_or_else(|| Error::Config(format!("{which} features were not extracted")))
    }

    pub fn recognizer(&self, mode: FeatureMode) -> Result<Box<dyn Recognizer>> {
        Ok(match mode {
            FeatureMode::Fbt => Box::new(PfldRecognizer {
                features: self.require("fbt", &self.fbt)?,
            }),
            FeatureMode::Dft => Box::new(PfldRecognizer {
                features: self.require("dft", &self.dft)?,
            }),
            FeatureMode::Fused => Box::new(FusedRecognizer {
                first: PfldRecognizer {
                    features: self.require("fbt", &self.fbt)?,
                },
                second: PfldRecognizer {
                    features: self.require("dft", &self.dft)?,
                },
            }),
        })
    }

    /// Rows for the feature file of one single-feature mode.
    pub fn records(&self, mode: FeatureMode) -> Result<Vec<FeatureRecord>> {
        let features = match mode {
            FeatureMode::Fbt => self.require("fbt", &self.fbt)?,
            FeatureMode::Dft => self.require("dft", &self.dft)?,
            FeatureMode::Fused => {
                return Err(Error::Config("fused mode has no single feature file".into()))
            }
        };
        Ok(self
            .image_ids
            .iter()
            .zip(&self.subjects)
            .zip(features)
            .map(|((image_id, subject_id), features)| FeatureRecord {
                image_id: image_id.clone(),
                subject_id: subject_id.clone(),
                features,
            })
            .collect())
    }
}
