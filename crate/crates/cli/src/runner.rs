use gibbswave_core::EnsembleRunner;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Runs ensemble members on a dedicated rayon pool. Results come back in
/// stream order regardless of which worker finished first.
pub struct ParallelRunner {
    pool: ThreadPool,
}

impl ParallelRunner {
    pub fn new(workers: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(Self {
            pool: ThreadPoolBuilder::new().num_threads(workers).build()?,
        })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl EnsembleRunner for ParallelRunner {
    fn run<T, F>(&self, members: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..members as u64).into_par_iter().map(job).collect())
    }
}

/// Worker count used when neither the command line nor the config sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
