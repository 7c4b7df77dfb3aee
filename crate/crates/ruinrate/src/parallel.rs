//! Multi-threaded [`PathRunner`] backed by rayon.

use rayon::prelude::*;
use ruinrate_core::PathRunner;

/// Distributes paths over the current rayon pool. Results come back in path
/// order, so estimates are identical for any number of threads.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl PathRunner for Parallel {
    fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync,
    {
        (0..n).into_par_iter().map(&f).collect()
    }
}
