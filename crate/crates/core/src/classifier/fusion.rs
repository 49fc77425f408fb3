use crate::error::{Error, Result};

use super::pfld::{argmax, ClassScores};

/// Per-class maximum of the two classifiers' normalized outputs.
pub fn fused_scores(a: &ClassScores, b: &ClassScores) -> Result<Vec<f64>> {
    if a.labels() != b.labels() {
        return Err(Error::Config(
            "cannot fuse classifiers trained on different class sets".into(),
        ));
    }
    Ok(a.normalized()
        .iter()
        .zip(b.normalized())
        .map(|(x, y)| x.max(*y))
        .collect())
}

/// Max-rule fusion: the label whose best normalized output over both
/// classifiers is highest, lowest class index on ties.
pub fn fuse_max(a: &ClassScores, b: &ClassScores) -> Result<String> {
    let fused = fused_scores(a, b)?;
    Ok(a.labels()[argmax(&fused)].clone())
}
