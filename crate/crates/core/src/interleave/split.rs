//! Corpus split boundaries and seeded subsetting.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STAGE_PAIRS: usize = 1_500_000;

/// Which input pairs feed each pretraining stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub translate: Range<usize>,
    pub bilingual: Range<usize>,
}

impl Default for CorpusSplit {
    /// First 1.5M pairs for translation, the next 1.5M for bilingual training.
    fn default() -> Self {
        Self { translate: 0..STAGE_PAIRS, bilingual: STAGE_PAIRS..2 * STAGE_PAIRS }
    }
}

/// Uniform sample of `k` items that keeps input order. Same seed, same sample.
pub fn sample_in_order<T>(items: impl IntoIterator<Item = T>, k: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<(usize, T)> = Vec::with_capacity(k);
    for (i, item) in items.into_iter().enumerate() {
        if i < k {
            reservoir.push((i, item));
        } else {
            let j = rng.gen_range(0..=i);
            if j < k {
                reservoir[j] = (i, item);
            }
        }
    }
    reservoir.sort_by_key(|(i, _)| *i);
    reservoir.into_iter().map(|(_, t)| t).collect()
}
