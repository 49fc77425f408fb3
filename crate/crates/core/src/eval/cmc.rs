use crate::error::{Error, Result};

use super::recognizer::ScoreMatrix;

/// Cumulative match characteristic: `proportion[r - 1]` is the fraction of
/// probes whose true subject ranks `r` or better.
#[derive(Debug, Clone, PartialEq)]
pub struct CmcCurve {
    pub proportion: Vec<f64>,
}

impl CmcCurve {
    /// Proportion at 1-based `rank`.
    pub fn at(&self, rank: usize) -> f64 {
        self.proportion[rank - 1]
    }

    pub fn len(&self) -> usize {
        self.proportion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proportion.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,proportion\n");
        for (r, p) in self.proportion.iter().enumerate() {
            out.push_str(&format!("{},{}\n", r + 1, p));
        }
        out
    }
}

/// Rank of each probe's true subject among the gallery classes, counting
/// every class scored at least as high (ties take the worst rank).
pub fn true_ranks<S: AsRef<str>>(scores: &ScoreMatrix, truth: &[S]) -> Result<Vec<usize>> {
    if truth.len() != scores.scores.len() {
        return Err(Error::Config(format!(
            "{} true labels for {} probes",
            truth.len(),
            scores.scores.len()
        )));
    }
    truth
        .iter()
        .zip(&scores.scores)
        .map(|(t, row)| {
            let t = t.as_ref();
            let c = scores
                .classes
                .iter()
                .position(|l| l == t)
                .ok_or_else(|| Error::Dataset(format!("probe subject `{t}` is not in the gallery")))?;
            Ok(row.iter().filter(|&&s| s >= row[c]).count())
        })
        .collect()
}

pub fn cmc<S: AsRef<str>>(scores: &ScoreMatrix, truth: &[S]) -> Result<CmcCurve> {
    let ranks = true_ranks(scores, truth)?;
    Ok(cmc_from_ranks(&ranks, scores.classes.len()))
}

pub fn cmc_from_ranks(ranks: &[usize], gallery_size: usize) -> CmcCurve {
    let mut counts = vec![0usize; gallery_size];
    for &r in ranks {
        counts[r - 1] += 1;
    }
    let total = ranks.len().max(1) as f64;
    let mut running = 0;
    let proportion = counts
        .iter()
        .map(|c| {
            running += c;
            running as f64 / total
        })
        .collect();
    CmcCurve { proportion }
}
