//! Seeded substream derivation for reproducible Monte Carlo runs.
//!
//! Every random draw in a simulation comes from a stream derived from
//! the scenario seed plus a role label and indices, so results are
//! bit-identical regardless of evaluation order or which parts of a
//! frame are actually simulated.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step, used to mix stream labels into the seed.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic RNG for the stream identified by `(seed, label, a, b)`.
pub fn substream(seed: u64, label: &str, a: u64, b: u64) -> ChaCha8Rng {
    let mut state = seed;
    for byte in label.bytes() {
        state ^= splitmix64(&mut state) ^ u64::from(byte);
    }
    state ^= splitmix64(&mut state) ^ a;
    state ^= splitmix64(&mut state) ^ b;
    ChaCha8Rng::seed_from_u64(splitmix64(&mut state))
}
