//! Deterministic random streams.
//!
//! Every random decision in the crate draws from a [`RngStream`] keyed by the
//! run seed plus a [`StreamId`] naming the consumer (which feature, which
//! iteration, which step). Streams with distinct ids are statistically
//! independent, so per-feature work can run on any number of threads without
//! changing a single draw, and re-running with the same seed reproduces the
//! model bit for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOMAIN_STUMP: u64 = 1;
const DOMAIN_FOLDS: u64 = 2;
const DOMAIN_PRETRAIN: u64 = 3;
const DOMAIN_PERTURB: u64 = 4;
const DOMAIN_POINT_PICK: u64 = 5;
const DOMAIN_SYNTH_FEATURES: u64 = 6;
const DOMAIN_SYNTH_NOISE: u64 = 7;

/// Names one independent stream of randomness within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamId {
    domain: u64,
    feature: u64,
    iteration: u64,
    step: u64,
}

impl StreamId {
    /// Stream for the stump appended to `feature` at outer `iteration`,
    /// inner `step`.
    pub fn stump(feature: u64, iteration: u64, step: u64) -> Self {
        StreamId {
            domain: DOMAIN_STUMP,
            feature,
            iteration,
            step,
        }
    }

    /// Stream for shuffling cross-validation folds at outer `iteration`.
    pub fn folds(iteration: u64) -> Self {
        StreamId {
            domain: DOMAIN_FOLDS,
            feature: 0,
            iteration,
            step: 0,
        }
    }

    /// Stream for the classification warm-up of `feature`'s booster.
    pub fn pretrain(feature: u64) -> Self {
        StreamId {
            domain: DOMAIN_PRETRAIN,
            feature,
            iteration: 0,
            step: 0,
        }
    }

    /// Stream for sampling a perturbation neighborhood.
    pub fn perturbation() -> Self {
        StreamId {
            domain: DOMAIN_PERTURB,
            feature: 0,
            iteration: 0,
            step: 0,
        }
    }

    /// Stream for picking dataset rows (e.g. the midpoint construction).
    pub fn point_pick() -> Self {
        StreamId {
            domain: DOMAIN_POINT_PICK,
            feature: 0,
            iteration: 0,
            step: 0,
        }
    }

    /// Stream for synthetic feature matrices.
    pub fn synth_features() -> Self {
        StreamId {
            domain: DOMAIN_SYNTH_FEATURES,
            feature: 0,
            iteration: 0,
            step: 0,
        }
    }

    /// Stream for synthetic target noise.
    pub fn synth_noise() -> Self {
        StreamId {
            domain: DOMAIN_SYNTH_NOISE,
            feature: 0,
            iteration: 0,
            step: 0,
        }
    }
}

/// A counter-based ChaCha8 generator keyed by `(seed, stream id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let mut h = mix(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut key = [0u8; 32];
        for (word, chunk) in [id.domain, id.feature, id.iteration, id.step]
            .iter()
            .zip(key.chunks_exact_mut(8))
        {
            h = mix(h ^ word.wrapping_mul(0xff51_afd7_ed55_8ccd));
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        RngStream {
            inner: ChaCha8Rng::from_seed(key),
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// splitmix64 finalizer; enough avalanche to decorrelate neighboring ids.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
