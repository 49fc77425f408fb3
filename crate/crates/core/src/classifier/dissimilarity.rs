use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Pairwise Euclidean distances between training images.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    ids: Vec<String>,
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Builds a matrix from explicit values (row-major, `n x n`).
    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::Config(format!(
                "{} ids need {} distances, got {}",
                n,
                n * n,
                values.len()
            )));
        }
        Ok(DissimilarityMatrix { ids, n, values })
    }

    /// Replaces the default positional ids.
    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Config(format!(
                "expected {} ids, got {}",
                self.n,
                ids.len()
            )));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distances between all pairs of `features`, which must share a layout.
pub fn dissimilarity_matrix(features: &[FeatureVector]) -> Result<DissimilarityMatrix> {
    if let Some(first) = features.first() {
        for f in &features[1..] {
            first.check_same_layout(f)?;
        }
    }
    let n = features.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(features[i].values(), features[j].values());
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DissimilarityMatrix {
        ids: (0..n).map(|i| i.to_string()).collect(),
        n,
        values,
    })
}

/// Distances from `probe` to each training vector, in training order.
pub fn embed_probe(probe: &FeatureVector, train: &[FeatureVector]) -> Result<Vec<f64>> {
    train
        .iter()
        .map(|t| {
            t.check_same_layout(probe)?;
            Ok(euclidean(probe.values(), t.values()))
        })
        .collect()
}
