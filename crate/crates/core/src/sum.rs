//! Fixed-order pairwise summation.
//!
//! The reduction tree depends only on the slice length, so results are
//! bit-identical regardless of how callers parallelize over outer loops.

use std::ops::Add;

const LEAF: usize = 32;

pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if values.len() <= LEAF {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n` without materializing the terms.
pub fn pairwise_sum_by<T, F>(n: usize, f: &F) -> T
where
    T: Copy + Default + Add<Output = T>,
    F: Fn(usize) -> T,
{
    fn rec<T, F>(lo: usize, hi: usize, f: &F) -> T
    where
        T: Copy + Default + Add<Output = T>,
        F: Fn(usize) -> T,
    {
        if hi - lo <= LEAF {
            return (lo..hi).fold(T::default(), |acc, i| acc + f(i));
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, f)
}

/// Trapezoid rule on a uniform grid with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (pairwise_sum(&values[1..n - 1]) + 0.5 * (values[0] + values[n - 1])),
    }
}
