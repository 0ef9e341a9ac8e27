//! Deterministic seed derivation and per-groomer random streams.
//!
//! Every simulation run is a pure function of one 64-bit seed. Inside a run,
//! groomer `i` draws tie creation from stream `2i` and partner selection from
//! stream `2i + 1`, so the realized tie counts do not depend on `alpha`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used by the CLI and experiments when none is given.
pub const DEFAULT_SEED: u64 = 20_180_601;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of coordinates into a master seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

/// Seed of one sweep cell: `(master, index(a), index(alpha), rep)`.
pub fn cell_seed(master: u64, a_index: usize, alpha_index: usize, rep: u64) -> u64 {
    derive_seed(master, &[a_index as u64, alpha_index as u64, rep])
}

pub(crate) fn creation_stream(seed: u64, groomer: usize) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * groomer as u64);
    rng
}

pub(crate) fn selection_stream(seed: u64, groomer: usize) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * groomer as u64 + 1);
    rng
}
