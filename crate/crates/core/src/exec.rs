//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool;
//! without it every call runs on the current thread. Results always come
//! back in input order, so callers see identical output either way.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exec {
    Sequential,
    /// rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Jobs(usize),
}

impl Exec {
    /// `--jobs N` style constructor: 1 means sequential.
    pub fn with_jobs(jobs: usize) -> Self {
        match jobs {
            0 => Exec::Parallel,
            1 => Exec::Sequential,
            n => Exec::Jobs(n),
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => sequential(items, f),
            #[cfg(feature = "parallel")]
            Exec::Parallel => parallel(items, f),
            #[cfg(feature = "parallel")]
            Exec::Jobs(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| parallel(items, f)),
                Err(_) => parallel(items, f),
            },
            #[cfg(not(feature = "parallel"))]
            Exec::Parallel | Exec::Jobs(_) => sequential(items, f),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let idx: Vec<usize> = (0..n).collect();
        self.map(&idx, |_, &i| f(i))
    }
}

fn sequential<T, R, F: Fn(usize, &T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(feature = "parallel")]
fn parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}
