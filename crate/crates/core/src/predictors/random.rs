use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::net::Sign;

/// Emits fair-coin signs from a seeded stream.
#[derive(Clone, Debug)]
pub struct RandomPredictor {
    rng: ChaCha8Rng,
}

impl RandomPredictor {
    pub fn new(seed: u64) -> Self {
        RandomPredictor { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn next_sign(&mut self) -> Sign {
        if self.rng.gen::<bool>() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl Iterator for RandomPredictor {
    type Item = Sign;

    fn next(&mut self) -> Option<Sign> {
        Some(self.next_sign())
    }
}
