//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shannon_invariants::{JointDistribution, SampleTable};

/// Sample table of `rows` rows with `sources` source columns over
/// `alphabet` symbols and a target with `alphabet` classes. Each source is
/// a noisy copy of the target, so the information terms are nontrivial.
pub fn wide_table(rows: usize, sources: usize, alphabet: u32, seed: u64) -> SampleTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (1..=sources).map(|i| format!("x{i}")).collect();
    names.push("y".to_string());
    let data = (0..rows)
        .map(|_| {
            let y = rng.random_range(0..alphabet);
            let mut row: Vec<String> = (0..sources)
                .map(|_| {
                    let s = if rng.random_bool(0.6) {
                        y
                    } else {
                        rng.random_range(0..alphabet)
                    };
                    s.to_string()
                })
                .collect();
            row.push(y.to_string());
            row
        })
        .collect();
    SampleTable::with_target_index(names, data, sources).expect("well-formed fixture")
}

/// Empirical distribution of [`wide_table`].
pub fn wide_distribution(rows: usize, sources: usize, alphabet: u32, seed: u64) -> JointDistribution {
    JointDistribution::from_samples(&wide_table(rows, sources, alphabet, seed))
        .expect("nonempty fixture")
}
