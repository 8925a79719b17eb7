//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`ExecMode::Parallel`] runs on the
//! rayon pool; without it both modes run sequentially. Results never depend
//! on the mode.

/// How the exhaustive loops execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Smallest `i < n` with `pred(i)`.
pub(crate) fn find_first<F>(n: u64, mode: ExecMode, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_first(|&i| pred(i));
    }
    let _ = mode;
    (0..n).find(|&i| pred(i))
}

/// `f(i)` for `i < n`, collected in index order.
pub(crate) fn map_collect<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Splits `0..n` into contiguous chunks, folds each with `fold` starting from
/// `init()`, and combines the chunk results left to right with `merge`.
pub(crate) fn chunked_fold<T, I, F, M>(n: u64, chunk: u64, mode: ExecMode, init: I, fold: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, u64) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    let run = |c: u64| {
        let mut acc = init();
        for i in c * chunk..((c + 1) * chunk).min(n) {
            fold(&mut acc, i);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        let parts: Vec<T> = (0..chunks).into_par_iter().map(run).collect();
        return parts.into_iter().fold(init(), &merge);
    }
    let _ = mode;
    (0..chunks).map(run).fold(init(), merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            assert_eq!(find_first(1000, mode, |i| i * i > 500), Some(23));
            assert_eq!(find_first(10, mode, |_| false), None);
            assert_eq!(map_collect(5, mode, |i| i * 2), vec![0, 2, 4, 6, 8]);
            let sum = chunked_fold(1001, 64, mode, || 0u64, |a, i| *a += i, |a, b| a + b);
            assert_eq!(sum, 500_500);
        }
    }
}
