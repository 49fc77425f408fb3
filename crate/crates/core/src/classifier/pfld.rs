//! One-vs-rest pseudo-Fisher linear discriminants on the dissimilarity space.
//!
//! For every class `c` the weights are the minimum-norm least-squares
//! solution of `[D - 1 m^T | 1] w_c = y_c`, with `m` the column means of the
//! training dissimilarities and `y_c = +1` on class members, `-1` elsewhere.
//! A probe at distances `d` scores `g_c = [d - m, 1] . w_c`.

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{FeatureLayout, FeatureVector};

use super::dissimilarity::{dissimilarity_matrix, embed_probe, DissimilarityMatrix};

/// Singular values below `SINGULAR_CUTOFF * sigma_max` are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-10;

/// Discriminant weights fitted on a dissimilarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PfldWeights {
    pub(crate) labels: Arc<[String]>,
    pub(crate) mean_offset: Vec<f64>,
    /// `weights[c]` has one entry per training image plus the bias.
    pub(crate) weights: Vec<Vec<f64>>,
}

impl PfldWeights {
    /// Class labels, sorted.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Column means subtracted from every embedding.
    pub fn mean_offset(&self) -> &[f64] {
        &self.mean_offset
    }

    /// Augmented weight vector (length `n_train + 1`, bias last) of class `c`.
    pub fn weights(&self, class: usize) -> &[f64] {
        &self.weights[class]
    }

    /// Raw discriminant outputs for an embedded probe.
    pub fn discriminants(&self, embedding: &[f64]) -> Vec<f64> {
        let n = self.mean_offset.len();
        self.weights
            .iter()
            .map(|w| {
                let linear: f64 = embedding
                    .iter()
                    .zip(&self.mean_offset)
                    .zip(&w[..n])
                    .map(|((d, m), wi)| (d - m) * wi)
                    .sum();
                linear + w[n]
            })
            .collect()
    }
}

/// Fits one discriminant per distinct subject.
pub fn fit_pfld<S: AsRef<str>>(d: &DissimilarityMatrix, subjects: &[S]) -> Result<PfldWeights> {
    let n = d.len();
    if subjects.len() != n {
        return Err(Error::Config(format!(
            "{} subject labels for {} training images",
            subjects.len(),
            n
        )));
    }
    let labels: Vec<String> = subjects
        .iter()
        .map(|s| s.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() < 2 {
        return Err(Error::Config(format!(
            "need at least 2 subjects to train, got {}",
            labels.len()
        )));
    }

    let mean_offset: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| d.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let x = DMatrix::from_fn(n, n + 1, |i, j| {
        if j < n {
            d.get(i, j) - mean_offset[j]
        } else {
            1.0
        }
    });
    let class_of: Vec<usize> = subjects
        .iter()
        .map(|s| labels.binary_search_by(|l| l.as_str().cmp(s.as_ref())).unwrap())
        .collect();
    let targets = DMatrix::from_fn(n, labels.len(), |i, c| {
        if class_of[i] == c {
            1.0
        } else {
            -1.0
        }
    });

    let solution = min_norm_least_squares(x, &targets);
    let weights = (0..labels.len())
        .map(|c| solution.column(c).iter().copied().collect())
        .collect();
    Ok(PfldWeights {
        labels: labels.into(),
        mean_offset,
        weights,
    })
}

/// `pinv(x) * targets` through the SVD of `x`.
fn min_norm_least_squares(x: DMatrix<f64>, targets: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = x.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma = &svd.singular_values;
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = SINGULAR_CUTOFF * largest;

    let mut projected = u.transpose() * targets;
    for (k, &s) in sigma.iter().enumerate() {
        let inv = if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 };
        projected.row_mut(k).scale_mut(inv);
    }
    v_t.transpose() * projected
}

/// Gallery plus fitted discriminants; immutable once trained.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub(crate) layout: FeatureLayout,
    pub(crate) train_features: Vec<FeatureVector>,
    pub(crate) pfld: PfldWeights,
}

impl TrainedModel {
    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn train_features(&self) -> &[FeatureVector] {
        &self.train_features
    }

    pub fn class_labels(&self) -> &[String] {
        self.pfld.labels()
    }

    pub fn mean_offset(&self) -> &[f64] {
        self.pfld.mean_offset()
    }

    pub fn weights(&self, class: usize) -> &[f64] {
        self.pfld.weights(class)
    }

    pub fn pfld(&self) -> &PfldWeights {
        &self.pfld
    }
}

/// Builds the dissimilarity space of `train` and fits the discriminants.
pub fn train_pfld<S: AsRef<str>>(train: &[FeatureVector], subjects: &[S]) -> Result<TrainedModel> {
    let first = train
        .first()
        .ok_or_else(|| Error::Config("empty training set".into()))?;
    let d = dissimilarity_matrix(train)?;
    let pfld = fit_pfld(&d, subjects)?;
    Ok(TrainedModel {
        layout: first.layout().clone(),
        train_features: train.to_vec(),
        pfld,
    })
}

/// Per-class outputs of a classified probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    labels: Arc<[String]>,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl ClassScores {
    /// Maps raw outputs through the logistic function and rescales them to
    /// sum to one.
    pub fn from_raw(labels: Arc<[String]>, raw: Vec<f64>) -> Self {
        let squashed: Vec<f64> = raw.iter().map(|&g| logistic(g)).collect();
        let total: f64 = squashed.iter().sum();
        let normalized = if total > 0.0 {
            squashed.iter().map(|s| s / total).collect()
        } else {
            vec![1.0 / raw.len() as f64; raw.len()]
        };
        ClassScores {
            labels,
            raw,
            normalized,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub(crate) fn shared_labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// Posterior-like scores in `[0, 1]` summing to one.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    pub fn predicted_index(&self) -> usize {
        argmax(&self.normalized)
    }

    pub fn predicted(&self) -> &str {
        &self.labels[self.predicted_index()]
    }
}

fn logistic(g: f64) -> f64 {
    if g >= 0.0 {
        1.0 / (1.0 + (-g).exp())
    } else {
        let e = g.exp();
        e / (1.0 + e)
    }
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn classify(model: &TrainedModel, probe: &FeatureVector) -> Result<ClassScores> {
    let embedding = embed_probe(probe, &model.train_features)?;
    let raw = model.pfld.discriminants(&embedding);
    Ok(ClassScores::from_raw(model.pfld.labels.clone(), raw))
}

impl TrainedModel {
    /// Classifies many probes in parallel, preserving their order.
    pub fn classify_all(&self, probes: &[FeatureVector]) -> Result<Vec<ClassScores>> {
        probes.par_iter().map(|p| classify(self, p)).collect()
    }
}
