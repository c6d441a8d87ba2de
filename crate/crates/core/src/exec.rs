//! Execution policy for per-particle loops.
//!
//! Every loop body computes the result of one particle from an immutable
//! snapshot, so the parallel and sequential paths produce bit-identical
//! output regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the crate is built without `parallel`.
    #[default]
    Parallel,
}

impl Execution {
    /// True when loops will actually be split across workers; a pool of
    /// one thread runs inline to avoid the scheduling overhead.
    pub fn is_parallel(self) -> bool {
        self == Execution::Parallel && current_threads() > 1
    }

    /// Collects `f(i)` for `i` in `0..n`.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Calls `f(i, &mut out[i])` for every element.
    pub fn for_each_mut<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
            return;
        }
        out.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }
}

/// Configures the global worker pool. Returns an error string if the pool
/// was already initialised. A no-op without the `parallel` feature.
pub fn init_thread_pool(threads: usize) -> std::result::Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

/// Number of worker threads the parallel policy will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
