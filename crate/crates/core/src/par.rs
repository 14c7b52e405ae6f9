//! Data-parallel helpers with a sequential fallback.
//!
//! Per-mode work (time integration) and per-cell work (sweeps, verification
//! batches) are embarrassingly parallel. Results are always collected into a
//! `Vec` in index order, and reductions over modes happen sequentially in
//! ascending index order afterwards, so output bits do not depend on the
//! thread count.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
