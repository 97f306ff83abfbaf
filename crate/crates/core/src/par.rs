//! Per-sample parallel maps.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it
//! they fall back to plain iterators. Output order always matches input
//! order, so reports are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential variants, used by the benches as the baseline.
pub mod seq {
    pub fn map<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
        items.iter().map(f).collect()
    }
}

pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
