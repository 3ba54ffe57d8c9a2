//! Data-parallel helpers with a sequential fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether engine loops run on the rayon pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    #[cfg(feature = "parallel")]
    fn enabled(self) -> bool {
        self == Parallelism::Parallel
    }
}

pub(crate) fn map<T, R, F>(par: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.enabled() {
        return items.par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = par;
    items.iter().map(f).collect()
}

pub(crate) fn map_range<R, F>(par: Parallelism, range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.enabled() {
        return range.into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = par;
    range.map(f).collect()
}

pub(crate) fn for_each_mut<T, F>(par: Parallelism, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.enabled() {
        items.par_iter_mut().for_each(f);
        return;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = par;
    items.iter_mut().for_each(f)
}
