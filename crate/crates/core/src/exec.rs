//! Data-parallel helpers with a sequential fallback.
//!
//! Every hot loop in the crate (guess enumeration, QBF outer assignments,
//! per-rule decomposition) goes through these helpers so that the same code
//! runs on rayon when the `parallel` feature is enabled and falls back to a
//! plain iterator otherwise. Callers pick the mode at runtime; without the
//! feature, [`Parallelism::Parallel`] silently degrades to sequential.

/// Execution mode for the data-parallel helpers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_range<T, F>(mode: Parallelism, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<I, T, F>(mode: Parallelism, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(usize, &I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let _ = mode;
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Returns `true` if `pred` holds for some index in `0..n`.
pub fn any_in_range<F>(mode: Parallelism, n: u64, pred: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().any(pred);
    }
    let _ = mode;
    (0..n).any(pred)
}

/// Like [`any_in_range`] but for fallible predicates. The first error seen
/// (in no particular order under parallel execution) aborts the search.
pub fn try_any_in_range<E, F>(mode: Parallelism, n: u64, pred: F) -> Result<bool, E>
where
    E: Send,
    F: Fn(u64) -> Result<bool, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        let hit = (0..n).into_par_iter().map(&pred).find_any(|r| !matches!(r, Ok(false)));
        return hit.unwrap_or(Ok(false));
    }
    let _ = mode;
    for i in 0..n {
        if pred(i)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_range(Parallelism::Sequential, 100, |i| i * i);
        let par = map_range(Parallelism::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            map_slice(Parallelism::Sequential, &xs, |i, x| i as u32 + x),
            map_slice(Parallelism::Parallel, &xs, |i, x| i as u32 + x)
        );
    }

    #[test]
    fn any_and_try_any() {
        for mode in [Parallelism::Sequential, Parallelism::Parallel] {
            assert!(any_in_range(mode, 1000, |i| i == 777));
            assert!(!any_in_range(mode, 10, |i| i > 10));
            assert_eq!(try_any_in_range::<(), _>(mode, 10, |i| Ok(i == 3)), Ok(true));
            assert_eq!(try_any_in_range(mode, 10, |i| if i == 5 { Err(i) } else { Ok(false) }), Err(5));
        }
    }
}
