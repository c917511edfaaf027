//! Deterministic data-parallel helpers.
//!
//! Every reduction here is chunked at a fixed width and the chunk partials
//! are folded in index order, so floating-point results are bit-identical
//! across thread counts and identical to the sequential build (the
//! `parallel` feature only changes who computes each chunk, not the
//! summation tree).

/// Fixed reduction chunk width. Changing this changes rounding, so it is a
/// crate-wide constant rather than a tuning knob.
pub const CHUNK: usize = 4096;

/// Minimum length before an elementwise map fans out to the pool. Each
/// element in our hot maps costs on the order of a microsecond (powf-heavy),
/// so a low threshold pays off.
pub const MAP_MIN: usize = 1024;

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;

    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        if n < super::MAP_MIN {
            (0..n).map(f).collect()
        } else {
            (0..n).into_par_iter().map(f).collect()
        }
    }

    pub fn chunk_partials<T, F>(n: usize, chunk: usize, part: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, usize) -> T + Send + Sync,
    {
        let nchunks = n.div_ceil(chunk);
        (0..nchunks)
            .into_par_iter()
            .map(|c| part(c * chunk, ((c + 1) * chunk).min(n)))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        (0..n).map(f).collect()
    }

    pub fn chunk_partials<T, F>(n: usize, chunk: usize, part: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, usize) -> T + Send + Sync,
    {
        let nchunks = n.div_ceil(chunk);
        (0..nchunks)
            .map(|c| part(c * chunk, ((c + 1) * chunk).min(n)))
            .collect()
    }
}

pub use imp::{chunk_partials, map_indexed};

/// Sum `f(i)` for `i in 0..n` with the fixed chunked reduction.
pub fn sum_by_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    let parts = chunk_partials(n, CHUNK, |lo, hi| {
        let mut s = 0.0;
        for i in lo..hi {
            s += f(i);
        }
        s
    });
    parts.into_iter().sum()
}

/// Complex variant of [`sum_by_f64`] with the same reduction tree.
pub fn sum_by_c64<F>(n: usize, f: F) -> crate::C64
where
    F: Fn(usize) -> crate::C64 + Send + Sync,
{
    let parts = chunk_partials(n, CHUNK, |lo, hi| {
        let mut s = crate::C64::new(0.0, 0.0);
        for i in lo..hi {
            s += f(i);
        }
        s
    });
    let mut total = crate::C64::new(0.0, 0.0);
    for p in parts {
        total += p;
    }
    total
}
