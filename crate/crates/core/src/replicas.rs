//! Replica driver: the single place where Monte Carlo loops fan out.
//!
//! `run_replicas(n, f)` evaluates `f(r)` for `r = 0..n` and returns the
//! results indexed by replica. With the `parallel` feature (default) the
//! loop runs on rayon's thread pool; without it, a plain sequential loop.
//! Because every `f` in this crate derives its randomness from the replica
//! index via [`crate::rng::RngStream::substream`], the two paths produce
//! identical vectors — parallelism is a throughput knob, never a semantics
//! knob. The criterion bench `replica_driver` compares the two paths.

/// Run `n` independent replicas and collect their results in index order.
pub fn run_replicas<T, F>(n: u32, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u32) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference implementation, always available (used by the bench
/// to compare against the feature-selected path).
pub fn run_replicas_sequential<T, F>(n: u32, f: F) -> Vec<T>
where
    F: Fn(u32) -> T,
{
    (0..n).map(f).collect()
}
