//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they are plain sequential loops. Results are identical either
//! way: every helper preserves index order and only uses exact or
//! order-independent reductions.

/// Name of the active execution strategy, used in bench and report labels.
#[cfg(feature = "parallel")]
pub const MODE: &str = "rayon";
#[cfg(not(feature = "parallel"))]
pub const MODE: &str = "sequential";

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps over a slice, preserving order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maximum of a slice of floats (NaN-free input assumed). `max` is exact and
/// associative, so the parallel reduction is deterministic.
pub fn max_f64(values: &[f64]) -> Option<(usize, f64)> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values.par_iter().copied().enumerate().reduce_with(pick_max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.iter().copied().enumerate().reduce(pick_max)
    }
}

// ties go to the lower index so the result does not depend on the split
fn pick_max(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Sum of integer counts over chunks; integer addition is exact.
pub fn sum_counts<F>(n: usize, f: F) -> Vec<u64>
where
    F: Fn(usize) -> Vec<u64> + Sync + Send,
{
    let parts = map_indices(n, f);
    let width = parts.first().map_or(0, Vec::len);
    let mut total = vec![0u64; width];
    for p in parts {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}
