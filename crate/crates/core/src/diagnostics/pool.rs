//! Trial fan-out with results ordered by trial index.

use rayon::prelude::*;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "MAGLAB_WORKERS";

/// Worker count from [`WORKERS_ENV`], defaulting to the logical core count.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// `f(0), …, f(n−1)` evaluated on the worker pool, returned in index order.
pub fn run_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = worker_count();
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}
