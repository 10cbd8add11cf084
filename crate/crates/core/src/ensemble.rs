//! Execution of independent ensemble members.

use alloc::vec::Vec;

/// Runs `job(stream_id)` for `stream_id = 0..members` and returns the results
/// in stream order, whatever order they were computed in.
pub trait EnsembleRunner {
    fn run<T, F>(&self, members: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs members one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl EnsembleRunner for Sequential {
    fn run<T, F>(&self, members: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..members as u64).map(job).collect()
    }
}
