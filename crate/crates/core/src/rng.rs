//! Seeded random streams.
//!
//! Every path is driven by a ChaCha8 stream keyed by a 64-bit seed. Replica
//! `i` of an ensemble uses stream number `i` of the same key, so replicas are
//! independent and their draws do not depend on scheduling.
//!
//! Uniforms are produced as `(next_u64 >> 11) * 2^-53`, i.e. on `[0, 1)` with
//! 53 bits of resolution. Simulators consume uniforms in a fixed order per
//! event (holding time, move class, increment, then the price-split uniform
//! where one exists), always drawing every uniform even when it is not needed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self::for_replica(seed, 0)
    }

    pub fn for_replica(seed: u64, replica: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(replica);
        Self { inner }
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * UNIT
    }

    /// Exponential variate with the given rate, by inversion of one uniform.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.uniform()).ln() / rate
    }
}
