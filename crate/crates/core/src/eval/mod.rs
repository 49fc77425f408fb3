//! Repeated-split error experiments, identification (CMC) and verification
//! (ROC, EER) protocols, and the per-coefficient error maps.

mod cmc;
mod experiment;
mod featuremap;
mod recognizer;
mod roc;
mod split;

pub use cmc::{cmc, cmc_from_ranks, true_ranks, CmcCurve};
pub use experiment::{
    error_rate, learning_curve, mean_and_sem, run_error_experiment, subject_curve, ErrorReport,
};
pub use featuremap::{per_feature_error_map, FeatureErrorMap};
pub use recognizer::{FusedRecognizer, PfldRecognizer, Recognizer, ScoreMatrix};
pub use roc::{
    equal_error_rate, verification_roc, verification_scores, EqualErrorRate, RocCurve,
    ScoreOrientation, ROC_THRESHOLDS,
};
pub use split::{random_split, Split, SplitSpec};

/// One row of a run summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub mean: f64,
    pub sem: f64,
    pub eer: Option<f64>,
}

/// `experiment,mean,sem,eer`; a missing EER is left empty.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("experiment,mean,sem,eer\n");
    for r in rows {
        let eer = r.eer.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.experiment, r.mean, r.sem, eer));
    }
    out
}

/// `k,mean,sem` rows of a learning or subject-count curve.
pub fn curve_csv(axis: &str, points: &[(usize, ErrorReport)]) -> String {
    let mut out = format!("{axis},mean,sem\n");
    for (k, r) in points {
        out.push_str(&format!("{k},{},{}\n", r.mean, r.sem));
    }
    out
}
