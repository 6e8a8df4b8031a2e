//! Data-parallel helpers. With the `parallel` feature (default) work is spread
//! over rayon's pool; without it, or with `Exec::Sequential`, the same closures
//! run in order. Results are collected in index order either way, so outputs
//! do not depend on the execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
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

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Maps over a slice, possibly in parallel, preserving order.
pub fn map_slice<I, T, F>(exec: Exec, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Send + Sync,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Splits `total` work items into fixed-size chunks `(start, len)`. The split
/// depends only on `total` and `chunk`, never on the thread count.
pub fn chunks(total: usize, chunk: usize) -> Vec<(usize, usize)> {
    let chunk = chunk.max(1);
    (0..total.div_ceil(chunk))
        .map(|c| {
            let start = c * chunk;
            (start, chunk.min(total - start))
        })
        .collect()
}

/// Number of worker threads available to `Exec::Parallel`.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
