use rayon::prelude::*;

use crate::error::Result;

use super::recognizer::Recognizer;
use super::split::{random_split, SplitSpec};

/// Mean and standard error of per-repetition error rates (fractions).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub errors: Vec<f64>,
    pub mean: f64,
    pub sem: f64,
}

impl ErrorReport {
    pub fn from_errors(errors: Vec<f64>) -> Self {
        let (mean, sem) = mean_and_sem(&errors);
        ErrorReport { errors, mean, sem }
    }
}

/// Sample mean and `stddev / sqrt(n)` with the `n - 1` variance; the error
/// of a single value is 0.
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Fraction of test probes whose top-scoring class is not their subject.
pub fn error_rate<S: AsRef<str>>(predicted: &[S], subjects: &[String], test: &[usize]) -> f64 {
    if test.is_empty() {
        return 0.0;
    }
    let wrong = predicted
        .iter()
        .zip(test)
        .filter(|(p, &i)| p.as_ref() != subjects[i])
        .count();
    wrong as f64 / test.len() as f64
}

/// Trains and tests `recognizer` on `spec.repetitions` seeded splits.
pub fn run_error_experiment(subjects: &[String], recognizer: &dyn Recognizer, spec: &SplitSpec) -> Result<ErrorReport> {
    spec.validate()?;
    let errors = (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            let split = random_split(subjects, spec, rep)?;
            let scores = recognizer.score(subjects, &split.train, &split.test)?;
            Ok(error_rate(&scores.predictions(), subjects, &split.test))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport::from_errors(errors))
}

/// Error versus number of training images per subject.
pub fn learning_curve(
    subjects: &[String],
    recognizer: &dyn Recognizer,
    spec: &SplitSpec,
    k_values: &[usize],
) -> Result<Vec<(usize, ErrorReport)>> {
    k_values
        .iter()
        .map(|&k| {
            let spec = SplitSpec {
                k_train_per_subject: k,
                ..*spec
            };
            Ok((k, run_error_experiment(subjects, recognizer, &spec)?))
        })
        .collect()
}

/// Error versus number of enrolled subjects.
pub fn subject_curve(
    subjects: &[String],
    recognizer: &dyn Recognizer,
    spec: &SplitSpec,
    counts: &[usize],
) -> Result<Vec<(usize, ErrorReport)>> {
    counts
        .iter()
        .map(|&n| {
            let spec = SplitSpec {
                n_subjects: Some(n),
                ..*spec
            };
            Ok((n, run_error_experiment(subjects, recognizer, &spec)?))
        })
        .collect()
}
