//! Counter-based random streams: the draws for sample `i` depend only on
//! `(seed, i)`, so any index range can be generated independently and the
//! output does not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CounterStreams {
    base: ChaCha8Rng,
}

impl CounterStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Fresh generator positioned at the start of stream `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_pure_functions_of_seed_and_index() {
        let a = CounterStreams::new(7);
        let b = CounterStreams::new(7);
        // Consume a different stream in between; must not matter.
        let _: u64 = a.stream(3).random();
        let x: [u64; 4] = a.stream(11).random();
        let y: [u64; 4] = b.stream(11).random();
        assert_eq!(x, y);
    }

    #[test]
    fn distinct_indices_differ() {
        let s = CounterStreams::new(7);
        let x: u64 = s.stream(0).random();
        let y: u64 = s.stream(1).random();
        assert_ne!(x, y);
        let z: u64 = CounterStreams::new(8).stream(0).random();
        assert_ne!(x, z);
    }
}
