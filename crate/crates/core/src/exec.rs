//! Chunked execution. With the `parallel` feature chunks are mapped on the
//! current rayon pool; without it (or with [`Execution::Sequential`]) they
//! run in order on the calling thread. Results always come back in chunk
//! order, so reductions over them are deterministic.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when chunks will actually be distributed over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }
}

/// Limits and execution mode shared by the exhaustive searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub execution: Execution,
    /// Maximum number of subspaces the subspace oracle may enumerate.
    pub subspace_cap: u64,
    /// Maximum number of search nodes for the subset searches.
    pub subset_budget: u64,
    /// Abandon long searches after this instant.
    pub deadline: Option<Instant>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            execution: Execution::default(),
            subspace_cap: crate::linalg::DEFAULT_SUBSPACE_CAP,
            subset_budget: 2_000_000_000,
            deadline: None,
        }
    }
}

impl SearchOptions {
    pub fn sequential() -> Self {
        Self { execution: Execution::Sequential, ..Self::default() }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Runs `f` inside a pool of `jobs` threads (0 = rayon default).
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send>(_jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}
