//! Order-preserving parallel map on a dedicated rayon pool.

use rayon::prelude::*;

/// Maps `f` over `items` with `workers` threads; results keep input order, so
/// the output does not depend on the worker count. `workers <= 1` runs inline.
pub fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}
