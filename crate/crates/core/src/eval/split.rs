use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub k_train_per_subject: usize,
    /// Keep only the first `n` subjects in id order.
    pub n_subjects: Option<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            k_train_per_subject: 5,
            n_subjects: None,
            repetitions: 10,
            seed: 1,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_train_per_subject == 0 {
            return Err(Error::Config("k_train_per_subject must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.n_subjects == Some(0) {
            return Err(Error::Config("subject cap must be at least 1".into()));
        }
        Ok(())
    }

    /// RNG seed of one repetition.
    pub fn repetition_seed(&self, repetition: usize) -> u64 {
        self.seed ^ repetition as u64
    }
}

/// Sample indices (into the dataset order) of one train/test partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Draws `k` training images per subject without replacement; the rest of
/// that subject's images go to the test set. `subjects[i]` labels sample `i`.
pub fn random_split<S: AsRef<str>>(subjects: &[S], spec: &SplitSpec, repetition: usize) -> Result<Split> {
    spec.validate()?;
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in subjects.iter().enumerate() {
        groups.entry(s.as_ref()).or_default().push(i);
    }
    let take = spec.n_subjects.unwrap_or(groups.len());
    if take > groups.len() {
        return Err(Error::Config(format!(
            "requested {take} subjects but the dataset has {}",
            groups.len()
        )));
    }
    let k = spec.k_train_per_subject;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.repetition_seed(repetition));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (subject, indices) in groups.into_iter().take(take) {
        if indices.len() <= k {
            return Err(Error::Dataset(format!(
                "subject `{subject}` has {} images, need more than {k} to leave a test image",
                indices.len()
            )));
        }
        let mut shuffled = indices;
        shuffled.shuffle(&mut rng);
        let (tr, te) = shuffled.split_at(k);
        train.extend_from_slice(tr);
        test.extend_from_slice(te);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}
