use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Index of the training value closest to `probe`, lowest index on ties.
pub(crate) fn nearest_label_index(train_values: &[f64], probe: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, &v) in train_values.iter().enumerate() {
        let d = (v - probe).abs();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    best
}

/// 1-D nearest neighbor on coefficient `feature_index`.
pub fn nearest_neighbor_single_feature<S: AsRef<str>>(
    train: &[FeatureVector],
    labels: &[S],
    probe: &FeatureVector,
    feature_index: usize,
) -> Result<String> {
    if train.is_empty() || train.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} training vectors with {} labels",
            train.len(),
            labels.len()
        )));
    }
    if feature_index >= probe.len() {
        return Err(Error::InputDomain(format!(
            "feature index {feature_index} out of range for {} features",
            probe.len()
        )));
    }
    let mut values = Vec::with_capacity(train.len());
    for t in train {
        t.check_same_layout(probe)?;
        values.push(t.values()[feature_index]);
    }
    let best = nearest_label_index(&values, probe.values()[feature_index]);
    Ok(labels[best].as_ref().to_string())
}
