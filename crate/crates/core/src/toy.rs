//! Labeled synthetic faces: each subject is a radial/angular pattern mix
//! with its own cycle pair, and every image jitters the radial frequency and
//! adds pixel noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, DatasetEntry};
use crate::error::{Error, Result};
use crate::features::synth_mix;
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToySpec {
    pub subjects: usize,
    pub images_per_subject: usize,
    pub size: usize,
    /// Uniform jitter half-width of the radial cycle count.
    pub cycle_jitter: f64,
    /// Uniform per-pixel noise half-width.
    pub noise: f64,
    pub seed: u64,
}

impl Default for ToySpec {
    fn default() -> Self {
        ToySpec {
            subjects: 10,
            images_per_subject: 10,
            size: 64,
            cycle_jitter: 0.15,
            noise: 0.05,
            seed: 7,
        }
    }
}

/// `(radial, angular)` cycles of subject `s`; distinct for `s < 20`.
pub fn toy_cycles(subject: usize) -> (f64, u32) {
    (3.0 + 2.0 * (subject % 5) as f64, 2 + 3 * (subject / 5) as u32)
}

/// Subject ids are `s00`, `s01`, ...; image ids `sNN/MM.pgm`, mirroring a
/// one-directory-per-subject tree.
pub fn toy_dataset(spec: &ToySpec) -> Result<Dataset> {
    if spec.subjects == 0 || spec.subjects > 20 || spec.images_per_subject == 0 {
        return Err(Error::Config(format!(
            "toy dataset needs 1..=20 subjects and at least one image each, got {}x{}",
            spec.subjects, spec.images_per_subject
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut entries = Vec::with_capacity(spec.subjects * spec.images_per_subject);
    for s in 0..spec.subjects {
        let (radial, angular) = toy_cycles(s);
        for j in 0..spec.images_per_subject {
            let jitter = if spec.cycle_jitter > 0.0 {
                rng.gen_range(-spec.cycle_jitter..=spec.cycle_jitter)
            } else {
                0.0
            };
            let base = synth_mix(radial + jitter, angular, spec.size)?;
            let pixels = base
                .pixels()
                .iter()
                .map(|&p| {
                    let n = if spec.noise > 0.0 {
                        rng.gen_range(-spec.noise..=spec.noise)
                    } else {
                        0.0
                    };
                    p + n
                })
                .collect();
            let image = GrayImage::new(spec.size, spec.size, pixels)?;
            entries.push(DatasetEntry::in_memory(
                format!("s{s:02}/{j:02}.pgm"),
                format!("s{s:02}"),
                image,
            ));
        }
    }
    Dataset::new(entries)
}
