//! Parallel/sequential dispatch for the data-parallel inner loops.
//!
//! Every parallel loop in the crate goes through these helpers. Work is cut
//! into fixed, index-ordered chunks and results are reduced in chunk order, so
//! both execution modes produce identical output.

use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; otherwise identical
    /// to `Sequential`.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

fn chunks(range: Range<u64>, chunk: u64) -> Vec<Range<u64>> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = start.saturating_add(chunk).min(range.end);
        out.push(start..end);
        start = end;
    }
    out
}

/// Map each chunk of `range` and fold the chunk results left to right.
pub fn map_reduce<T, M, R>(exec: Exec, range: Range<u64>, chunk: u64, map: M, identity: T, reduce: R) -> T
where
    T: Send,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let parts = chunks(range, chunk);
    let results: Vec<T> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            parts.into_par_iter().map(&map).collect()
        }
        _ => parts.into_iter().map(&map).collect(),
    };
    results.into_iter().fold(identity, reduce)
}

/// First (lowest-index) chunk result that is `Some`.
pub fn find_first<T, M>(exec: Exec, range: Range<u64>, chunk: u64, map: M) -> Option<T>
where
    T: Send,
    M: Fn(Range<u64>) -> Option<T> + Sync + Send,
{
    let parts = chunks(range, chunk);
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            parts.into_par_iter().find_map_first(&map)
        }
        _ => parts.into_iter().find_map(&map),
    }
}
