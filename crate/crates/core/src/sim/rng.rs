use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic, splittable generator used for measurement sampling and
/// noise.
///
/// A child stream is keyed by `(master seed, domain, index)`: the first two
/// select the ChaCha key, the index selects the stream. Trial `i` therefore
/// draws the same numbers regardless of which thread runs it.
#[derive(Clone, Debug)]
pub struct SimRng(ChaCha8Rng);

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SimRng {
    /// Identifies the derivation scheme; bump when it changes.
    pub const ALGORITHM: &'static str = "chacha8-splitmix-stream/v1";

    pub fn from_seed(seed: u64) -> Self {
        Self::derive(seed, 0, 0)
    }

    pub fn derive(master: u64, domain: u64, index: u64) -> Self {
        let mut sm = master ^ domain.rotate_left(32) ^ 0x005E_ED0F_C0DE;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut sm).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        Self(rng)
    }

    /// Uniform sample in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}
