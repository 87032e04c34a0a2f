//! Deterministic map over indexed work units, parallel when the `parallel`
//! feature is enabled.
//!
//! Every data-parallel loop in the crate is phrased as "map the indices
//! `0..n` through a pure function, collect in index order". Each work unit
//! derives its own RNG stream from its index, and reductions happen on the
//! collected vector, so the result is independent of thread count and of
//! whether rayon is compiled in at all.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Cap the number of worker threads used by the data-parallel loops
/// (`0` keeps the default of one thread per core). Call at most once, before
/// the first parallel computation. Results never depend on the thread count,
/// so this only trades latency for niceness toward co-tenants.
#[cfg(feature = "parallel")]
pub fn set_max_threads(jobs: usize) -> crate::Result<()> {
    if jobs == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| crate::Error::Input(format!("thread pool already configured: {e}")))
}

/// Sequential build: every loop runs on the calling thread, so the cap is
/// accepted and ignored.
#[cfg(not(feature = "parallel"))]
pub fn set_max_threads(_jobs: usize) -> crate::Result<()> {
    Ok(())
}
