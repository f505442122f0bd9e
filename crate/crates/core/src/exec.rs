//! Execution mode for the data-parallel loops (pixels, frames, samples).
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] fans work out over
//! rayon's pool. Without it, both variants run sequentially. Work items are
//! independent and results are written to fixed slots, so the output never
//! depends on the mode or on thread scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Apply `f(row_index, row)` to every `row_len`-sized chunk of `data`.
    pub fn for_each_row<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        if row_len == 0 {
            return;
        }
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(j, row)| f(j, row));
            return;
        }
        data.chunks_mut(row_len)
            .enumerate()
            .for_each(|(j, row)| f(j, row));
    }

    /// Ordered map over `0..n`.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Ordered map over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let mut a = vec![0u64; 64 * 7];
        let mut b = a.clone();
        let fill = |j: usize, row: &mut [u64]| {
            for (i, v) in row.iter_mut().enumerate() {
                *v = (j * 1000 + i) as u64;
            }
        };
        Exec::Sequential.for_each_row(&mut a, 64, fill);
        Exec::Parallel.for_each_row(&mut b, 64, fill);
        assert_eq!(a, b);
        assert_eq!(
            Exec::Sequential.map_range(100, |i| i * i),
            Exec::Parallel.map_range(100, |i| i * i)
        );
    }
}
