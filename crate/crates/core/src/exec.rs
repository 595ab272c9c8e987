//! Deterministic chunked execution.
//!
//! Work is split into chunks identified by a stable index; chunk results are
//! collected in index order and reduced sequentially, so the output is
//! bit-identical no matter how many worker threads run the map phase. With
//! the `parallel` feature disabled the map phase simply runs inline.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
