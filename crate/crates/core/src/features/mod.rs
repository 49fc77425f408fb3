//! Per-image descriptors: Fourier-Bessel coefficients, DFT magnitudes and
//! the synthetic test patterns used to sanity-check them.

mod csv;
mod dft;
mod fbt;
mod synth;

use std::fmt;
use std::str::FromStr;

pub use self::csv::{parse_feature_csv, write_feature_csv, FeatureRecord};
pub use self::dft::{dft_features, dft_lattice, dft_magnitude, DftConfig, MagnitudeSpectrum};
pub use self::fbt::{fbt, fbt_features, inverse_fbt, FbSpectrum, FbtConfig, FbtPlan};
pub use self::synth::{
    principal_components, synth_angular, synth_mix, synth_oracle, synth_radial, Component, OracleCheck,
};

use crate::error::{Error, Result};

/// Coefficient component of a Fourier-Bessel feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FbPart {
    /// cosine coefficient `A`
    A,
    /// sine coefficient `B`
    B,
}

/// Where a single feature value comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureCoord {
    Fbt { part: FbPart, order: usize, root: usize },
    Dft { u: i64, v: i64 },
    Index(usize),
}

/// Extraction recipe of a feature vector, serialized as its `layout_id`.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureLayout {
    /// `fbt-o{max_order}-r{max_root}`: A then B, order-major, root-minor.
    Fbt { max_order: usize, max_root: usize },
    /// `dft-c{max_cycles}`: disk of integer frequencies, see [`dft_lattice`].
    Dft { max_cycles: f64 },
    /// Any other tag; length is not checked.
    Custom(String),
}

impl FeatureLayout {
    /// Expected vector length, when the layout determines it.
    pub fn expected_len(&self) -> Option<usize> {
        match self {
            FeatureLayout::Fbt {
                max_order,
                max_root,
            } => Some((max_order + 1) * max_root * 2),
            FeatureLayout::Dft { max_cycles } => Some(dft_lattice(*max_cycles).len()),
            FeatureLayout::Custom(_) => None,
        }
    }

    /// Spectrum position of feature `index`.
    pub fn coord(&self, index: usize) -> FeatureCoord {
        match self {
            FeatureLayout::Fbt {
                max_order,
                max_root,
            } => {
                let per_part = (max_order + 1) * max_root;
                let part = if index < per_part { FbPart::A } else { FbPart::B };
                let local = index % per_part;
                FeatureCoord::Fbt {
                    part,
                    order: local / max_root,
                    root: local % max_root + 1,
                }
            }
            FeatureLayout::Dft { max_cycles } => {
                let (u, v) = dft_lattice(*max_cycles)[index];
                FeatureCoord::Dft { u, v }
            }
            FeatureLayout::Custom(_) => FeatureCoord::Index(index),
        }
    }
}

impl fmt::Display for FeatureLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureLayout::Fbt {
                max_order,
                max_root,
            } => write!(f, "fbt-o{max_order}-r{max_root}"),
            FeatureLayout::Dft { max_cycles } => write!(f, "dft-c{max_cycles}"),
            FeatureLayout::Custom(tag) => f.write_str(tag),
        }
    }
}

impl FromStr for FeatureLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.contains(',') || s.contains(char::is_whitespace) {
            return Err(Error::Config(format!("invalid layout id `{s}`")));
        }
        if let Some(rest) = s.strip_prefix("fbt-o") {
            if let Some((order, root)) = rest.split_once("-r") {
                if let (Ok(max_order), Ok(max_root)) = (order.parse(), root.parse()) {
                    return Ok(FeatureLayout::Fbt {
                        max_order,
                        max_root,
                    });
                }
            }
        }
        if let Some(rest) = s.strip_prefix("dft-c") {
            if let Ok(max_cycles) = rest.parse::<f64>() {
                return Ok(FeatureLayout::Dft { max_cycles });
            }
        }
        Ok(FeatureLayout::Custom(s.to_string()))
    }
}

/// Flattened per-image descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    layout: FeatureLayout,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(layout: FeatureLayout, values: Vec<f64>) -> Result<Self> {
        if let Some(expected) = layout.expected_len() {
            if expected != values.len() {
                return Err(Error::Config(format!(
                    "layout {layout} expects {expected} values, got {}",
                    values.len()
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain("feature values must be finite".into()));
        }
        Ok(FeatureVector { layout, values })
    }

    /// Vector under a free-form layout tag.
    pub fn custom(tag: &str, values: Vec<f64>) -> Result<Self> {
        Self::new(FeatureLayout::Custom(tag.to_string()), values)
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn layout_id(&self) -> String {
        self.layout.to_string()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check_same_layout(&self, other: &FeatureVector) -> Result<()> {
        if self.layout != other.layout || self.values.len() != other.values.len() {
            return Err(Error::LayoutMismatch {
                expected: format!("{} ({} values)", self.layout, self.values.len()),
                found: format!("{} ({} values)", other.layout, other.values.len()),
            });
        }
        Ok(())
    }
}
