use std::sync::Arc;

use crate::classifier::{train_pfld, ClassScores, TrainedModel};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Per-probe class scores, higher meaning more likely.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub classes: Arc<[String]>,
    /// `scores[probe][class]`
    pub scores: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn from_class_scores(scores: &[ClassScores]) -> Result<Self> {
        let classes = match scores.first() {
            Some(s) => s.shared_labels().clone(),
            None => Arc::from(Vec::<String>::new()),
        };
        Ok(ScoreMatrix {
            classes,
            scores: scores.iter().map(|s| s.normalized().to_vec()).collect(),
        })
    }

    /// Predicted label per probe, lowest class index on ties.
    pub fn predictions(&self) -> Vec<&str> {
        self.scores
            .iter()
            .map(|row| self.classes[crate::classifier::argmax_index(row)].as_str())
            .collect()
    }
}

/// Anything that can be trained on one subset of a labeled sample list and
/// score another.
pub trait Recognizer: Sync {
    fn score(&self, subjects: &[String], train: &[usize], test: &[usize]) -> Result<ScoreMatrix>;
}

fn gather(features: &[FeatureVector], idx: &[usize]) -> Vec<FeatureVector> {
    idx.iter().map(|&i| features[i].clone()).collect()
}

fn train_on(features: &[FeatureVector], subjects: &[String], train: &[usize]) -> Result<TrainedModel> {
    let labels: Vec<&str> = train.iter().map(|&i| subjects[i].as_str()).collect();
    train_pfld(&gather(features, train), &labels)
}

/// Dissimilarity-space PFLD on one feature type.
#[derive(Debug, Clone)]
pub struct PfldRecognizer {
    pub features: Vec<FeatureVector>,
}

impl PfldRecognizer {
    pub fn class_scores(&self, subjects: &[String], train: &[usize], test: &[usize]) -> Result<Vec<ClassScores>> {
        let model = train_on(&self.features, subjects, train)?;
        model.classify_all(&gather(&self.features, test))
    }
}

impl Recognizer for PfldRecognizer {
    fn score(&self, subjects: &[String], train: &[usize], test: &[usize]) -> Result<ScoreMatrix> {
        ScoreMatrix::from_class_scores(&self.class_scores(subjects, train, test)?)
    }
}

/// Two PFLD classifiers trained on the same split, combined by the max rule.
#[derive(Debug, Clone)]
pub struct FusedRecognizer {
    pub first: PfldRecognizer,
    pub second: PfldRecognizer,
}

impl Recognizer for FusedRecognizer {
    fn score(&self, subjects: &[String], train: &[usize], test: &[usize]) -> Result<ScoreMatrix> {
        let a = self.first.class_scores(subjects, train, test)?;
        let b = self.second.class_scores(subjects, train, test)?;
        if a.len() != b.len() {
            return Err(Error::Config("fused classifiers scored different probe counts".into()));
        }
        let classes = a
            .first()
            .map(|s| s.shared_labels().clone())
            .unwrap_or_else(|| Arc::from(Vec::<String>::new()));
        let scores = a
            .iter()
            .zip(&b)
            .map(|(x, y)| crate::classifier::fused_scores(x, y))
            .collect::<Result<_>>()?;
        Ok(ScoreMatrix { classes, scores })
    }
}
