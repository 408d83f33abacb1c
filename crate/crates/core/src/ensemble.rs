//! Seeded random-word ensembles.
//!
//! Every sample draws its word from its own ChaCha stream, seeded by mixing
//! `(seed, size, index)`. Samples therefore do not depend on each other, on
//! the sample count, or on the order in which they are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::{average_scattering_entropy, EntropyError, QuadratureConfig};
use crate::families::{random_word, FamilyError, FamilyKind, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("no sizes requested")]
    NoSizes,

    #[error("family {0} is not built from words")]
    NotAWordFamily(FamilyKind),

    #[error("size {size}, sample {index}: {source}")]
    Family { size: usize, index: usize, source: FamilyError },

    #[error("size {size}, sample {index}: {source}")]
    Entropy { size: usize, index: usize, source: EntropyError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub family: FamilyKind,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
}

impl EnsembleSpec {
    pub fn new(family: FamilyKind, sizes: Vec<usize>, seed: u64) -> Self {
        Self { family, sizes, samples: 100, seed, quadrature: QuadratureConfig::default() }
    }

    fn validate(&self) -> Result<(), EnsembleError> {
        if !self.family.takes_word() {
            return Err(EnsembleError::NotAWordFamily(self.family));
        }
        if self.sizes.is_empty() {
            return Err(EnsembleError::NoSizes);
        }
        if self.samples < 2 {
            return Err(EnsembleError::TooFewSamples(self.samples));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub size: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub values: Vec<f64>,
}

/// splitmix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the stream for one `(size, index)` sample.
pub fn sample_seed(seed: u64, size: usize, index: usize) -> u64 {
    mix(mix(mix(seed) ^ size as u64) ^ index as u64)
}

pub fn sample_word(seed: u64, size: usize, index: usize) -> Result<Word, FamilyError> {
    random_word(size, &mut ChaCha8Rng::seed_from_u64(sample_seed(seed, size, index)))
}

pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Vec<EnsembleStats>, EnsembleError> {
    let seed = spec.seed;
    run_ensemble_with(spec, |size, index| sample_word(seed, size, index))
}

/// Like [`run_ensemble`] but with words taken from `source(size, index)`.
pub fn run_ensemble_with<F>(spec: &EnsembleSpec, source: F) -> Result<Vec<EnsembleStats>, EnsembleError>
where
    F: Fn(usize, usize) -> Result<Word, FamilyError> + Sync,
{
    spec.validate()?;
    spec.sizes
        .iter()
        .map(|&size| {
            let values = (0..spec.samples)
                .into_par_iter()
                .map(|index| {
                    let tag = |source| EnsembleError::Family { size, index, source };
                    let word = source(size, index).map_err(tag)?;
                    let g = spec.family.with_word(word).expect("word family").build().map_err(tag)?;
                    average_scattering_entropy(&g, 0, &spec.quadrature)
                        .map(|r| r.value)
                        .map_err(|source| EnsembleError::Entropy { size, index, source })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let (mean, std_dev) = summary_stats(&values)?;
            Ok(EnsembleStats { size, mean, std_dev, values })
        })
        .collect()
}

/// Mean and sample standard deviation (divisor `n - 1`).
pub fn summary_stats(values: &[f64]) -> Result<(f64, f64), EnsembleError> {
    let n = values.len();
    if n < 2 {
        return Err(EnsembleError::TooFewSamples(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1) as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Letter;

    #[test]
    fn stats_examples() {
        assert_eq!(summary_stats(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0));
        let (m, s) = summary_stats(&[0.0, 2.0]).unwrap();
        assert_eq!(m, 1.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
        let alternating: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 0.4 } else { 0.6 }).collect();
        let (m, s) = summary_stats(&alternating).unwrap();
        assert!((m - 0.5).abs() < 1e-14);
        assert!((s - (0.01f64 * 100.0 / 99.0).sqrt()).abs() < 1e-14);
        assert_eq!(summary_stats(&[1.0]), Err(EnsembleError::TooFewSamples(1)));
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        assert_eq!(sample_word(5, 13, 3).unwrap(), sample_word(5, 13, 3).unwrap());
        assert_ne!(sample_word(5, 13, 3).unwrap(), sample_word(5, 13, 4).unwrap());
        assert_ne!(sample_seed(5, 13, 3), sample_seed(6, 13, 3));
    }

    #[test]
    fn constant_stream_has_zero_spread() {
        let mut spec = EnsembleSpec::new(FamilyKind::Line, vec![3], 0);
        spec.samples = 4;
        let stats = run_ensemble_with(&spec, |size, _| Word::uniform(Letter::Alpha, size)).unwrap();
        let direct = average_scattering_entropy(
            &crate::families::build_line(&Word::uniform(Letter::Alpha, 3).unwrap()).unwrap(),
            0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(stats[0].std_dev, 0.0);
        assert_eq!(stats[0].mean, direct.value);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = EnsembleSpec::new(FamilyKind::Gamma, vec![3], 0);
        assert_eq!(run_ensemble(&spec), Err(EnsembleError::NotAWordFamily(FamilyKind::Gamma)));
        spec.family = FamilyKind::Circle;
        spec.samples = 1;
        assert_eq!(run_ensemble(&spec), Err(EnsembleError::TooFewSamples(1)));
        spec.samples = 2;
        spec.sizes.clear();
        assert_eq!(run_ensemble(&spec), Err(EnsembleError::NoSizes));
        spec.sizes = vec![2];
        assert!(matches!(run_ensemble(&spec), Err(EnsembleError::Family { size: 2, index: 0, .. })));
    }
}
