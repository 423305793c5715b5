//! Worker count from `BSD_KURAMOTO_THREADS` (unset or `0` means all available cores).

use std::thread;

use crate::CliError;

pub const THREADS_VAR: &str = "BSD_KURAMOTO_THREADS";

pub fn worker_count() -> Result<usize, CliError> {
    parse(std::env::var(THREADS_VAR).ok().as_deref())
}

fn parse(value: Option<&str>) -> Result<usize, CliError> {
    let auto = || thread::available_parallelism().map_or(1, |n| n.get());
    match value.map(str::trim) {
        None | Some("") => Ok(auto()),
        Some(s) => match s.parse::<usize>() {
            Ok(0) => Ok(auto()),
            Ok(n) => Ok(n),
            Err(_) => Err(CliError::Config {
                field: THREADS_VAR.into(),
                message: format!("expected a non-negative integer, got {s:?}"),
            }),
        },
    }
}

/// Evaluates `f(0..count)` on up to `workers` threads. Results come back in index order, so
/// the outcome does not depend on the worker count.
pub fn map_indexed<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(&f).collect();
    }
    let chunk = count.div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || (w * chunk..((w + 1) * chunk).min(count)).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
