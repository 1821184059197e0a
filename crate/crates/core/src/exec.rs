//! Row-chunked execution, parallel with the `parallel` feature.
//!
//! Work is always split into fixed-size chunks and per-chunk results are
//! returned in chunk order, so reductions performed by the caller are
//! independent of the number of worker threads. With the feature disabled,
//! [`Exec::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Applies `f(chunk_index, chunk)` to consecutive `chunk`-sized pieces of
    /// `out`, collecting results in chunk order.
    pub fn map_chunks_mut<T, R, F>(self, out: &mut [T], chunk: usize, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(usize, &mut [T]) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return out
                .par_chunks_mut(chunk)
                .enumerate()
                .map(|(i, c)| f(i, c))
                .collect();
        }
        out.chunks_mut(chunk).enumerate().map(|(i, c)| f(i, c)).collect()
    }

    /// Applies `f` to every index in `0..n` in chunks, collecting in order.
    pub fn map_range<R, F>(self, n: usize, chunk: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        let ranges: Vec<_> = (0..n.div_ceil(chunk))
            .map(|i| i * chunk..((i + 1) * chunk).min(n))
            .collect();
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return ranges.into_par_iter().map(f).collect();
        }
        ranges.into_iter().map(f).collect()
    }
}
