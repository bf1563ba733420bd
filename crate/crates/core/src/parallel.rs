use rayon::{ThreadPool, ThreadPoolBuilder};

/// Runs `f` inside a rayon pool capped at `workers` threads (0 means all cores).
///
/// Results of every parallel routine in this crate are merged with set or
/// sorted semantics, so the worker count never changes an output.
pub(crate) fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    match pool(workers) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn pool(workers: usize) -> Option<ThreadPool> {
    if workers == 0 {
        return None;
    }
    ThreadPoolBuilder::new().num_threads(workers).build().ok()
}
