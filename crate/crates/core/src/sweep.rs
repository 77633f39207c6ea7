//! Data-parallel sweeps over verification sets.
//!
//! With the `parallel` feature the top-level functions run on rayon; without
//! it they fall back to the sequential versions in [`seq`]. Both variants are
//! always deterministic: `find_first` returns the earliest hit in input order.

pub mod seq {
    pub fn find_first<T, R, F>(items: &[T], f: F) -> Option<R>
    where
        F: Fn(&T) -> Option<R>,
    {
        items.iter().find_map(f)
    }

    pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        F: Fn(&T) -> R,
    {
        items.iter().map(f).collect()
    }

    pub fn all<T, F>(items: &[T], f: F) -> bool
    where
        F: Fn(&T) -> bool,
    {
        items.iter().all(f)
    }
}

#[cfg(feature = "parallel")]
pub mod par {
    use rayon::prelude::*;

    pub fn find_first<T, R, F>(items: &[T], f: F) -> Option<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        items.par_iter().find_map_first(f)
    }

    pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.par_iter().map(f).collect()
    }

    pub fn all<T, F>(items: &[T], f: F) -> bool
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        items.par_iter().all(f)
    }
}

#[cfg(feature = "parallel")]
pub use par::{all, find_first, map};
#[cfg(not(feature = "parallel"))]
pub use seq::{all, find_first, map};

/// All ordered pairs `(i, j)` with `i, j < n`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
}

/// All ordered triples with entries below `n`.
pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_in_input_order() {
        let v: Vec<u32> = (0..1000).collect();
        let hit = find_first(&v, |&x| (x % 97 == 96).then_some(x));
        assert_eq!(hit, Some(96));
        assert_eq!(seq::find_first(&v, |&x| (x > 5000).then_some(x)), None);
        assert_eq!(map(&v[..3], |x| x * 2), vec![0, 2, 4]);
        assert_eq!(pairs(2), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(triples(2).len(), 8);
    }
}
