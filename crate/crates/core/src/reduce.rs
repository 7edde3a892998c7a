//! Fixed-order reductions.
//!
//! Parallel loops in this crate compute per-item partial results in parallel
//! and combine them here in index order, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;

/// Sums `f(i)` for `i in 0..n`. Items are evaluated in parallel; the final
/// accumulation runs sequentially in index order.
pub fn ordered_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let parts: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    parts.iter().sum()
}

/// Kahan-compensated sum of a slice, in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
