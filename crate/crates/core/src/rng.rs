//! Deterministic random-stream construction.
//!
//! Every stochastic routine takes an explicit generator. Parallel Monte Carlo
//! replications each get an independent stream derived from one master seed,
//! so results are identical regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` under master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id carrying the simulation randomness of replication `rep`.
pub fn sim_stream(rep: u64) -> u64 {
    2 * rep
}

/// Stream id carrying the optimizer-start randomness of replication `rep`.
pub fn search_stream(rep: u64) -> u64 {
    2 * rep + 1
}
