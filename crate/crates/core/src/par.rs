//! Worker-count-aware execution of pure batch work.
//!
//! With the `parallel` feature the work runs on a dedicated rayon pool; with
//! the feature off, or one worker, it runs inline. Every call site maps a
//! pure function over a batch and consumes results by index, so schedules
//! cannot change any observable output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
use crate::error::Error;
use crate::error::Result;

pub(crate) enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

impl Exec {
    /// `workers` = 0 picks the default pool size; 1 forces the sequential
    /// path even in parallel builds.
    pub(crate) fn new(workers: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            if workers != 1 {
                let mut builder = rayon::ThreadPoolBuilder::new();
                if workers > 1 {
                    builder = builder.num_threads(workers);
                }
                let pool = builder
                    .build()
                    .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
                return Ok(Exec::Pool(pool));
            }
        }
        #[cfg(not(feature = "parallel"))]
        let _ = workers;
        Ok(Exec::Sequential)
    }

    pub(crate) fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Send + Sync,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Pool(pool) => pool.install(|| items.par_iter().map(f).collect()),
        }
    }
}
