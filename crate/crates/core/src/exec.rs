//! Execution policy for the data-parallel reductions. Without the
//! `parallel` feature both policies run sequentially.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Maps every item and folds the results with an associative `reduce`.
    /// The sequential path folds left to right; the parallel path may
    /// regroup, so `reduce` must not depend on grouping.
    pub fn map_reduce<T, R, M, F>(self, items: &[T], map: M, identity: impl Fn() -> R + Sync + Send, reduce: F) -> R
    where
        T: Sync,
        R: Send,
        M: Fn(&T) -> R + Sync + Send,
        F: Fn(R, R) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(map).reduce(identity, reduce)
            }
            _ => items.iter().map(map).fold(identity(), reduce),
        }
    }

    /// Maps every item keeping input order.
    pub fn map<T, R, M>(self, items: &[T], map: M) -> Vec<R>
    where
        T: Sync,
        R: Send,
        M: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(map).collect()
            }
            _ => items.iter().map(map).collect(),
        }
    }

    /// Like [`Exec::map`] over `0..n`.
    pub fn map_range<R, M>(self, n: usize, map: M) -> Vec<R>
    where
        R: Send,
        M: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(map).collect()
            }
            _ => (0..n).map(map).collect(),
        }
    }
}
