use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::recognizer::ScoreMatrix;

pub const ROC_THRESHOLDS: usize = 100;

/// How verification scores are compared with the threshold `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreOrientation {
    /// Distance-like (`1 - posterior`); a claim is confirmed when `s <= c`.
    #[default]
    Distance,
    /// Similarity-like (the posterior itself); confirmed when `s >= c`.
    Similarity,
}

impl FromStr for ScoreOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(ScoreOrientation::Distance),
            "similarity" => Ok(ScoreOrientation::Similarity),
            other => Err(Error::Config(format!(
                "unknown score orientation `{other}` (expected distance or similarity)"
            ))),
        }
    }
}

impl fmt::Display for ScoreOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreOrientation::Distance => "distance",
            ScoreOrientation::Similarity => "similarity",
        })
    }
}

impl ScoreOrientation {
    fn accepts(self, score: f64, threshold: f64) -> bool {
        match self {
            ScoreOrientation::Distance => score <= threshold,
            ScoreOrientation::Similarity => score >= threshold,
        }
    }
}

/// Verification probability and false-alarm rate over equally spaced
/// thresholds, ordered from most strict to most lenient so both rates are
/// nondecreasing along the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub orientation: ScoreOrientation,
    pub thresholds: Vec<f64>,
    pub verification: Vec<f64>,
    pub false_alarm: Vec<f64>,
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,pv,pf\n");
        for k in 0..self.thresholds.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.thresholds[k], self.verification[k], self.false_alarm[k]
            ));
        }
        out
    }
}

/// Genuine (same subject) and impostor (different subject) match scores of
/// every probe against every gallery class, oriented per `orientation`.
pub fn verification_scores<S: AsRef<str>>(
    scores: &ScoreMatrix,
    truth: &[S],
    orientation: ScoreOrientation,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if truth.len() != scores.scores.len() {
        return Err(Error::Config("one true label per probe required".into()));
    }
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for (t, row) in truth.iter().zip(&scores.scores) {
        for (class, &p) in scores.classes.iter().zip(row) {
            let s = match orientation {
                ScoreOrientation::Distance => 1.0 - p,
                ScoreOrientation::Similarity => p,
            };
            if class == t.as_ref() {
                genuine.push(s);
            } else {
                impostor.push(s);
            }
        }
    }
    Ok((genuine, impostor))
}

pub fn verification_roc(genuine: &[f64], impostor: &[f64], orientation: ScoreOrientation) -> Result<RocCurve> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::InputDomain(
            "verification needs both genuine and impostor scores".into(),
        ));
    }
    let all = genuine.iter().chain(impostor);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InputDomain("scores must be finite".into()));
    }
    let step = (hi - lo) / (ROC_THRESHOLDS - 1) as f64;
    let mut thresholds: Vec<f64> = (0..ROC_THRESHOLDS)
        .map(|k| if k + 1 == ROC_THRESHOLDS { hi } else { lo + k as f64 * step })
        .collect();
    if orientation == ScoreOrientation::Similarity {
        thresholds.reverse();
    }
    let rate = |set: &[f64], c: f64| {
        set.iter().filter(|&&s| orientation.accepts(s, c)).count() as f64 / set.len() as f64
    };
    let verification = thresholds.iter().map(|&c| rate(genuine, c)).collect();
    let false_alarm = thresholds.iter().map(|&c| rate(impostor, c)).collect();
    Ok(RocCurve {
        orientation,
        thresholds,
        verification,
        false_alarm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualErrorRate {
    /// Mean of incorrect rejection and false alarm at `threshold`.
    pub rate: f64,
    pub threshold: f64,
    /// Consecutive thresholds between which incorrect rejection falls
    /// below false alarm.
    pub bracket: (f64, f64),
}

/// Threshold where incorrect rejection `1 - P_V` is closest to `P_F`.
pub fn equal_error_rate(roc: &RocCurve) -> EqualErrorRate {
    let gap = |k: usize| (1.0 - roc.verification[k]) - roc.false_alarm[k];
    let mut best = 0;
    for k in 1..roc.thresholds.len() {
        if gap(k).abs() < gap(best).abs() {
            best = k;
        }
    }
    let cross = (0..roc.thresholds.len()).find(|&k| gap(k) <= 0.0).unwrap_or(roc.thresholds.len() - 1);
    let bracket = (roc.thresholds[cross.saturating_sub(1)], roc.thresholds[cross]);
    EqualErrorRate {
        rate: 0.5 * ((1.0 - roc.verification[best]) + roc.false_alarm[best]),
        threshold: roc.thresholds[best],
        bracket,
    }
}
