//! Execution strategy for the data-parallel loops (shots, strategy
//! enumeration, time sweeps).

/// Selects the rayon path or the plain iterator path.
///
/// Without the `parallel` feature both variants run sequentially, so call
/// sites never need their own `cfg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// `f(0..n)` collected in index order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maximum of `f` over `0..n`, `None` for an empty range.
    pub fn max_range<T, F>(self, n: usize, f: F) -> Option<T>
    where
        T: Ord + Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).max()
            }
            _ => (0..n).map(f).max(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let seq = Exec::Sequential.map_range(1000, |i| i * i);
        let par = Exec::Parallel.map_range(1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(
            Exec::Sequential.max_range(50, |i| (i * 7) % 13),
            Exec::Parallel.max_range(50, |i| (i * 7) % 13)
        );
        assert_eq!(Exec::Parallel.max_range(0, |i| i), None);
    }
}
