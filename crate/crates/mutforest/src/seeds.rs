//! Reproducible random number streams.
//!
//! Each (seed, replicate, purpose) triple owns a dedicated ChaCha stream, so
//! results are bit-identical however replicates are scheduled across
//! workers. Replicate results are always collected in replicate order before
//! any folding, keeping floating-point reductions deterministic too.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag of a stream; keeps different engines off each other's
/// randomness even when they share a replicate index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamKind {
    ForestSample = 0,
    WalkCensus = 1,
    CtDirect = 2,
    CtLamperti = 3,
    Emergence = 4,
    Aux = 5,
}

/// Rng for one replicate of one engine.
pub fn replicate_rng(seed: u64, replicate: u64, kind: StreamKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replicate << 8) | kind as u64);
    rng
}

/// Runs `replicates` jobs with their replicate rngs and returns results in
/// replicate order. `workers <= 1` runs inline; otherwise a dedicated rayon
/// pool of that size is used. Output is identical either way.
pub fn run_replicates<T, F>(
    seed: u64,
    replicates: u64,
    kind: StreamKind,
    workers: usize,
    job: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(u64, ChaCha8Rng) -> T + Sync,
{
    if workers <= 1 {
        (0..replicates)
            .map(|rep| job(rep, replicate_rng(seed, rep, kind)))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("pool construction cannot fail for positive thread counts");
        pool.install(|| {
            use rayon::prelude::*;
            (0..replicates)
                .into_par_iter()
                .map(|rep| job(rep, replicate_rng(seed, rep, kind)))
                .collect()
        })
    }
}
