//! Replica-parallel map with a sequential fallback.
//!
//! Each replica owns the substream derived from its index, so the values
//! produced are a pure function of (seed, replica index) and the output
//! vector is identical whether the map runs on one thread or many. With the
//! `parallel` feature (default) the map fans out over rayon's current
//! thread pool; without it the same code runs sequentially.
//!
//! Reductions over replica outputs must happen after this ordered collect,
//! never inside a parallel fold, or worker count would leak into floating
//! point summation order.

use crate::rng::{GaussianStream, Seed};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over replica indices `0..replicas`, each with its own substream.
/// Output order follows replica index.
#[cfg(feature = "parallel")]
pub fn replica_map<T, F>(seed: &Seed, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut GaussianStream) -> T + Sync,
{
    (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = GaussianStream::new(&seed.child(i));
            f(i, &mut stream)
        })
        .collect()
}

/// Sequential build of [`replica_map`].
#[cfg(not(feature = "parallel"))]
pub fn replica_map<T, F>(seed: &Seed, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut GaussianStream) -> T + Sync,
{
    replica_map_seq(seed, replicas, f)
}

/// Always-sequential variant; the benches compare this against the parallel
/// path on identical workloads.
pub fn replica_map_seq<T, F>(seed: &Seed, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut GaussianStream) -> T + Sync,
{
    (0..replicas as u64)
        .map(|i| {
            let mut stream = GaussianStream::new(&seed.child(i));
            f(i, &mut stream)
        })
        .collect()
}
