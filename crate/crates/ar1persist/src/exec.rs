//! Execution helpers for the data-parallel inner loops.
//!
//! Every caller is written so that the result is a deterministic function
//! of its inputs alone: work items own their random substream and results
//! are merged in index order. The `parallel` feature therefore changes
//! only wall-clock time, never output.

/// Maps `f` over `0..n` and collects results in index order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled,
/// sequentially otherwise.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_indexed`], kept callable under every feature
/// set so benchmarks can compare the two code paths directly.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Applies `f` to every element of `items` in place.
#[cfg(feature = "parallel")]
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter_mut().for_each(f);
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    items.iter_mut().for_each(f);
}

/// Sequential twin of [`for_each_mut`] for benchmark comparisons.
pub fn for_each_mut_seq<T, F>(items: &mut [T], f: F)
where
    F: Fn(&mut T),
{
    items.iter_mut().for_each(f);
}
