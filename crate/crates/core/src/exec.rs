//! Execution mode for the data-parallel kernels.
//!
//! Every parallel entry point takes an [`Execution`] and produces the same
//! result in both modes; only the scheduling differs.  Without the `parallel`
//! feature, `Execution::Parallel` silently runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..len`, preserving order.
pub fn map_indexed<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Folds `0..len` with an associative, commutative `merge`.
pub fn fold_indexed<T, F, M, I>(exec: Execution, len: usize, init: I, f: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, usize) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .fold(&init, &f)
            .reduce(&init, &merge);
    }
    let _ = (exec, &merge);
    (0..len).fold(init(), f)
}

/// Runs `op` with at most `threads` workers.  `None` keeps the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(k) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
        {
            return pool.install(op);
        }
    }
    let _ = threads;
    op()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_indexed(Execution::Sequential, 100, |i| i * i);
        let b = map_indexed(Execution::Parallel, 100, |i| i * i);
        assert_eq!(a, b);
        let s = fold_indexed(
            Execution::Parallel,
            1000,
            || 0u64,
            |acc, i| acc + i as u64,
            |a, b| a + b,
        );
        assert_eq!(s, 499500);
    }

    #[test]
    fn thread_cap_does_not_change_results() {
        let a = with_threads(Some(1), || map_indexed(Execution::Parallel, 50, |i| i + 1));
        let b = with_threads(Some(3), || map_indexed(Execution::Parallel, 50, |i| i + 1));
        assert_eq!(a, b);
    }
}
