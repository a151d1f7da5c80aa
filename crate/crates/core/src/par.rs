//! Data-parallel helpers. With the `parallel` feature the parallel paths run
//! on rayon's global pool; without it they fall back to sequential loops.

/// How a batch or scan is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Parallel when the crate is built with `parallel`, sequential otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Indices in `0..len` for which `keep` holds, in ascending order.
pub fn filter_indices<F>(len: usize, exec: Execution, keep: F) -> Vec<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().filter(|&i| keep(i)).collect();
    }
    let _ = exec;
    (0..len).filter(|&i| keep(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let items: Vec<u32> = (0..1000).collect();
        let seq = map(&items, Execution::Sequential, |x| x * 3);
        let par = map(&items, Execution::Parallel, |x| x * 3);
        assert_eq!(seq, par);
        let a = filter_indices(1000, Execution::Sequential, |i| i % 7 == 0);
        let b = filter_indices(1000, Execution::Parallel, |i| i % 7 == 0);
        assert_eq!(a, b);
    }
}
