//! Deterministic parallel fan-out over path indices.
//!
//! Work is split into fixed-size chunks whose boundaries depend only on the
//! number of paths, never on the thread count. Each chunk is processed
//! sequentially and the per-chunk results come back in chunk order, so any
//! fold over them is bit-identical regardless of scheduling.

use std::ops::Range;

use rayon::prelude::*;

pub const DEFAULT_CHUNK: u64 = 256;

/// Run `f` over `[0, n)` split into chunks of `chunk` indices; results are
/// returned in index order.
pub fn map_chunks<T, F>(n: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = n.div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            f(lo..(lo + chunk).min(n))
        })
        .collect()
}

/// Per-index map with results in index order.
pub fn map_indices<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_chunks(n, DEFAULT_CHUNK, |r| r.map(&f).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}
