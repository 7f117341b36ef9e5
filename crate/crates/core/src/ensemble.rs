//! Seeded random joint distributions for certification runs.
//!
//! Every joint outcome over the product alphabet gets an i.i.d. `Exp(1)`
//! weight before normalization, so the support is full and the weights are
//! uniform on the simplex. Trial `i` draws from ChaCha stream `i` of the
//! seed, which makes any single trial reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::dist::JointDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n_sources: usize,
    /// Alphabet sizes are drawn uniformly from `2..=max_alphabet`.
    pub max_alphabet: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn new(n_sources: usize, seed: u64) -> Self {
        Self {
            n_sources,
            max_alphabet: 4,
            seed,
        }
    }

    /// The distribution for trial `index`.
    pub fn trial(&self, index: u64) -> Result<JointDistribution> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        random_distribution(&mut rng, self.n_sources, self.max_alphabet)
    }

    pub fn iter(&self, trials: u64) -> impl Iterator<Item = Result<JointDistribution>> + '_ {
        (0..trials).map(move |i| self.trial(i))
    }
}

/// One random distribution with `n_sources` sources and a target.
pub fn random_distribution<R: Rng>(
    rng: &mut R,
    n_sources: usize,
    max_alphabet: usize,
) -> Result<JointDistribution> {
    if n_sources == 0 {
        return Err(Error::OutOfRangeInput("need at least one source".into()));
    }
    if max_alphabet < 2 {
        return Err(Error::OutOfRangeInput(format!(
            "max_alphabet {max_alphabet} < 2"
        )));
    }
    let sizes: Vec<usize> = (0..=n_sources)
        .map(|_| rng.random_range(2..=max_alphabet))
        .collect();
    let total: usize = sizes.iter().product();
    let mut entries = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut outcome = vec![0u32; sizes.len()];
        for (slot, &s) in outcome.iter_mut().zip(&sizes).rev() {
            *slot = (rem % s) as u32;
            rem /= s;
        }
        let w: f64 = rng.sample(Exp1);
        entries.push((outcome, w));
    }
    JointDistribution::from_weights(&sizes, entries)
}
