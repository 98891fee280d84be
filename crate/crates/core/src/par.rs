//! Chunked map-reduce over index ranges, running on rayon when the
//! `parallel` feature is enabled and sequentially otherwise.
//!
//! Chunk boundaries depend only on the range and the chunk size, never on
//! the thread count, so any reduction that is associative on exact values
//! (integer counts, rationals) is reproducible bit for bit.

use std::ops::Range;

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the current rayon pool; identical to `Sequential` without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

fn chunk_range(total: u64, chunk: u64, index: u64) -> Range<u64> {
    let start = index * chunk;
    start..(start + chunk).min(total)
}

pub fn fold_chunks<T, I, F, C>(
    exec: Execution,
    total: u64,
    chunk: u64,
    identity: I,
    fold: F,
    combine: C,
) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, Range<u64>) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = total.div_ceil(chunk);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..chunks)
            .into_par_iter()
            .map(|c| fold(identity(), chunk_range(total, chunk, c)))
            .reduce(&identity, &combine);
    }
    let _ = exec;
    (0..chunks).fold(identity(), |acc, c| {
        combine(acc, fold(identity(), chunk_range(total, chunk, c)))
    })
}

/// Maps every index in `0..len` and collects the results in order.
pub fn map_collect<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}
