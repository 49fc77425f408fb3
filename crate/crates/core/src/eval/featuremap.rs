use rayon::prelude::*;

use crate::classifier::nearest_label_index;
use crate::error::{Error, Result};
use crate::features::{FbPart, FeatureCoord, FeatureLayout, FeatureVector};

use super::experiment::error_rate;
use super::split::{random_split, SplitSpec};

/// Mean single-feature nearest-neighbor error of every coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureErrorMap {
    pub layout: FeatureLayout,
    /// One mean error (fraction) per feature index.
    pub errors: Vec<f64>,
}

impl FeatureErrorMap {
    /// Errors arranged like the spectrum.
    ///
    /// FBT: one row per order, columns `A` roots then `B` roots.
    /// DFT: the centered `(2K+1) x (2K+1)` frequency plane, row `v`,
    /// column `u`, `K = floor(max_cycles)`; cells outside the disk are `None`.
    /// Other layouts: a single row.
    pub fn to_grid(&self) -> Vec<Vec<Option<f64>>> {
        match &self.layout {
            FeatureLayout::Fbt {
                max_order,
                max_root,
            } => {
                let mut grid = vec![vec![None; 2 * max_root]; max_order + 1];
                for (k, &e) in self.errors.iter().enumerate() {
                    if let FeatureCoord::Fbt { part, order, root } = self.layout.coord(k) {
                        let col = match part {
                            FbPart::A => root - 1,
                            FbPart::B => max_root + root - 1,
                        };
                        grid[order][col] = Some(e);
                    }
                }
                grid
            }
            FeatureLayout::Dft { max_cycles } => {
                let half = max_cycles.floor() as i64;
                let side = (2 * half + 1) as usize;
                let mut grid = vec![vec![None; side]; side];
                for (k, &e) in self.errors.iter().enumerate() {
                    if let FeatureCoord::Dft { u, v } = self.layout.coord(k) {
                        grid[(v + half) as usize][(u + half) as usize] = Some(e);
                    }
                }
                grid
            }
            FeatureLayout::Custom(_) => vec![self.errors.iter().map(|&e| Some(e)).collect()],
        }
    }

    pub fn to_csv(&self) -> String {
        let grid = self.to_grid();
        let mut out = String::new();
        let (corner, columns, row_names): (&str, Vec<String>, Vec<String>) = match &self.layout {
            FeatureLayout::Fbt { max_root, .. } => (
                "order",
                (1..=*max_root)
                    .map(|i| format!("A{i}"))
                    .chain((1..=*max_root).map(|i| format!("B{i}")))
                    .collect(),
                (0..grid.len()).map(|n| n.to_string()).collect(),
            ),
            FeatureLayout::Dft { max_cycles } => {
                let half = max_cycles.floor() as i64;
                let axis: Vec<String> = (-half..=half).map(|u| u.to_string()).collect();
                ("v\\u", axis.clone(), axis)
            }
            FeatureLayout::Custom(_) => (
                "row",
                (0..self.errors.len()).map(|k| k.to_string()).collect(),
                vec!["0".to_string()],
            ),
        };
        out.push_str(corner);
        for c in &columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (name, row) in row_names.iter().zip(&grid) {
            out.push_str(name);
            for cell in row {
                out.push(',');
                if let Some(e) = cell {
                    out.push_str(&e.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the 1-D nearest-neighbor experiment on each coefficient separately
/// over the seeded splits of `spec`.
pub fn per_feature_error_map(features: &[FeatureVector], subjects: &[String], spec: &SplitSpec) -> Result<FeatureErrorMap> {
    let first = features
        .first()
        .ok_or_else(|| Error::Config("no feature vectors".into()))?;
    if features.len() != subjects.len() {
        return Err(Error::Config(format!(
            "{} feature vectors with {} subject labels",
            features.len(),
            subjects.len()
        )));
    }
    for f in features {
        first.check_same_layout(f)?;
    }
    let splits = (0..spec.repetitions)
        .map(|rep| random_split(subjects, spec, rep))
        .collect::<Result<Vec<_>>>()?;

    let errors = (0..first.len())
        .into_par_iter()
        .map(|k| {
            let total: f64 = splits
                .iter()
                .map(|split| {
                    let train: Vec<f64> = split.train.iter().map(|&i| features[i].values()[k]).collect();
                    let predicted: Vec<&str> = split
                        .test
                        .iter()
                        .map(|&i| subjects[split.train[nearest_label_index(&train, features[i].values()[k])]].as_str())
                        .collect();
                    error_rate(&predicted, subjects, &split.test)
                })
                .sum();
            total / splits.len() as f64
        })
        .collect();
    Ok(FeatureErrorMap {
        layout: first.layout().clone(),
        errors,
    })
}
