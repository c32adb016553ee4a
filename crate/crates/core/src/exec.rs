//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) the row loop of the sparse
//! matrix-vector product and batch-level maps run on the rayon pool. Without
//! it every path is sequential. Results are identical either way: each output
//! element is produced by the same sequential arithmetic, and batch results
//! are collected in input order.

/// How a kernel should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Serial,
    /// Rayon when compiled with `parallel`, serial otherwise.
    #[default]
    Parallel,
}

/// Below this many rows a sparse product is never split across threads.
#[cfg(feature = "parallel")]
pub(crate) const PAR_MIN_ROWS: usize = 4096;

/// `true` if `parallel` was compiled in.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Map `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
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

/// Map `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
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

/// Fill `out[i] = f(i)` for every row, splitting across threads when allowed.
pub(crate) fn fill_rows<F>(exec: Exec, out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel && out.len() >= PAR_MIN_ROWS {
        use rayon::prelude::*;
        out.par_iter_mut()
            .with_min_len(1024)
            .enumerate()
            .for_each(|(i, o)| *o = f(i));
        return;
    }
    let _ = exec;
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}
