//! Deterministic derivation of independent random streams.
//!
//! Every random draw in a trial comes from a stream keyed by
//! `(master_seed, trial, algorithm, purpose)`. The environment stream uses a
//! fixed algorithm sentinel so all algorithms of a trial see the same
//! environment while drawing graphs, actions and rewards independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The PRNG behind every stream.
pub type StreamRng = ChaCha8Rng;

/// Algorithm slot used for streams shared by all algorithms of a trial.
pub const SHARED_ALGORITHM: u64 = u64::MAX;

pub const ENV_TAG: &str = "env";
pub const BENCHMARK_TAG: &str = "benchmark";
pub const GRAPH_TAG: &str = "graph";
pub const ACTION_TAG: &str = "action";
pub const REWARD_TAG: &str = "reward";
pub const SOLVER_TAG: &str = "solver";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

// FNV-1a, stable across platforms and toolchains unlike `DefaultHasher`.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// 64-bit key for a stream.
pub fn stream_key(master_seed: u64, trial: u64, algorithm: u64, purpose: &str) -> u64 {
    let mut h = splitmix64(master_seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ algorithm);
    splitmix64(h ^ fnv1a(purpose.as_bytes()))
}

pub fn derive_stream(master_seed: u64, trial: u64, algorithm: u64, purpose: &str) -> StreamRng {
    StreamRng::seed_from_u64(stream_key(master_seed, trial, algorithm, purpose))
}

/// Environment stream of a trial; independent of the algorithm by construction.
pub fn env_stream(master_seed: u64, trial: u64) -> StreamRng {
    derive_stream(master_seed, trial, SHARED_ALGORITHM, ENV_TAG)
}
