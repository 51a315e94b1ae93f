//! Reproducible, splittable random streams.
//!
//! A stream is a `(master_seed, stream_id)` pair mapped onto a ChaCha12
//! key and stream number, so every stream is an independent counter-mode
//! sequence. Parallel work derives one stream per task index and therefore
//! never depends on scheduling.

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream `index` of this stream. Children of distinct parents, and
    /// distinct children of one parent, never share a key/stream pair in practice.
    pub fn derive(&self, index: u64) -> RngStream {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_id.wrapping_add(0x5851_F42D)));
        RngStream::new(key, index)
    }
}

pub fn draw_uniform(stream: &RngStream, n: usize) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| Open01.sample(&mut rng)).collect()
}

pub fn draw_normal(stream: &RngStream, n: usize) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn draw_exponential(stream: &RngStream, n: usize) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| Exp1.sample(&mut rng)).collect()
}
