//! Data-parallel helpers with a sequential fallback.
//!
//! Per-document work (parsing, graph construction, forward/backward
//! passes, evaluation) is embarrassingly parallel. With the `parallel`
//! feature enabled these helpers fan out over rayon; without it they
//! degrade to plain iterators. Output order always matches input order,
//! so reductions over the results stay deterministic either way.

/// Always-sequential map, kept public so benchmarks can compare against
/// the parallel path directly.
pub fn map_seq<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    map_seq(items, f)
}

/// Map over owned items, preserving order.
#[cfg(feature = "parallel")]
pub fn map_owned<T: Send, U: Send>(items: Vec<T>, f: impl Fn(T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_owned<T, U>(items: Vec<T>, f: impl Fn(T) -> U) -> Vec<U> {
    items.into_iter().map(f).collect()
}

/// Map with the item index, preserving order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(usize, &T) -> U + Sync + Send,
) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, U>(items: &[T], f: impl Fn(usize, &T) -> U) -> Vec<U> {
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(map(&items, f), map_seq(&items, f));
    }

    #[test]
    fn order_is_preserved() {
        let items: Vec<usize> = (0..503).collect();
        let out = map_indexed(&items, |i, &x| (i, x));
        assert!(out.iter().enumerate().all(|(i, &(j, x))| i == j && x == i));
    }
}
