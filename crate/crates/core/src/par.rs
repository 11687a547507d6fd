//! Data-parallel helpers: rayon when the `parallel` feature is on, plain iterators
//! otherwise. Results always come back in input order, so reductions stay
//! deterministic.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces the sequential path at runtime (benchmarks, `threads = 1`).
pub fn set_sequential(on: bool) {
    SEQUENTIAL.store(on, Ordering::Relaxed);
}

#[cfg(feature = "parallel")]
fn parallel_now() -> bool {
    is_parallel() && !SEQUENTIAL.load(Ordering::Relaxed)
}

/// Sizes the global pool; `1` means sequential. Only the first call can size
/// the pool, later ones just toggle the sequential switch.
pub fn configure_threads(n: usize) {
    set_sequential(n == 1);
    #[cfg(feature = "parallel")]
    if n > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_now() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_now() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Fallible map; the first error in input order wins.
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
