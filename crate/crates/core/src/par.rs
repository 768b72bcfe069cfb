//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) the work is spread over the rayon
//! pool; without it everything runs on the calling thread. Results keep the
//! input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    map_seq(items, f)
}

/// Map `f` over `0..n`.
#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Fill `out[i] = f(i)` for every index.
#[cfg(feature = "parallel")]
pub fn fill<R, F>(out: &mut [R], f: F)
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

#[cfg(not(feature = "parallel"))]
pub fn fill<R, F>(out: &mut [R], f: F)
where
    F: Fn(usize) -> R,
{
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

/// Call `f(row, chunk)` for each consecutive `row_len`-sized chunk of `out`.
#[cfg(feature = "parallel")]
pub fn rows_mut<T, F>(out: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    out.par_chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub fn rows_mut<T, F>(out: &mut [T], row_len: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    out.chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
}

/// Sequential map, always available.
pub fn map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<f64> = (0..1000).map(f64::from).collect();
        let f = |x: &f64| x.sqrt() * 3.0;
        assert_eq!(map(&xs, f), map_seq(&xs, f));
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
        let mut out = vec![0usize; 7];
        fill(&mut out, |i| i + 1);
        assert_eq!(out, (1..=7).collect::<Vec<_>>());
        let mut grid = vec![0usize; 6];
        rows_mut(&mut grid, 3, |r, row| row.iter_mut().enumerate().for_each(|(c, x)| *x = 10 * r + c));
        assert_eq!(grid, vec![0, 1, 2, 10, 11, 12]);
    }
}
