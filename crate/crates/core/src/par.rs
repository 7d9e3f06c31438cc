//! Data-parallel map with a sequential fallback.
//!
//! Table rows and evaluation grids are independent computations over
//! immutable inputs, so they parallelize freely. The `parallel` feature
//! (on by default) routes them through rayon; without it the same code
//! runs sequentially. Output order always follows input order.

#[cfg(feature = "parallel")]
pub(crate) fn pmap<I, O, F>(items: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn pmap<I, O, F>(items: Vec<I>, f: F) -> Vec<O>
where
    F: Fn(I) -> O,
{
    items.into_iter().map(f).collect()
}
