//! Execution strategy: data-parallel loops with a sequential fallback.
//!
//! With the `parallel` feature (default) the loops below run on the rayon
//! global pool; without it they run inline. Work is always split at fixed
//! chunk boundaries and partial results are folded in chunk order, so the
//! outcome is bit-identical regardless of thread count or feature choice.

/// Fixed batch-row chunk used by the network engine and the evaluators.
///
/// Chunk boundaries are part of the numeric contract (floating-point sums are
/// folded per chunk, in chunk order); changing this value changes results in
/// the last ulps, so it is a constant rather than a tunable.
pub const CHUNK_ROWS: usize = 64;

/// Ordered map over `0..n`.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Ordered map over `0..n`.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Splits `0..len` into chunks of `chunk` (last one may be short) and maps
/// `f(start, len)` over them, preserving chunk order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync + Send,
{
    assert!(chunk > 0);
    let chunks = len.div_ceil(chunk);
    map_indexed(chunks, |i| {
        let start = i * chunk;
        f(start, chunk.min(len - start))
    })
}

/// Chunked map-reduce: partials are produced in parallel and folded
/// sequentially in chunk order.
pub fn fold_chunks<T, F, G>(len: usize, chunk: usize, map: F, mut fold: G) -> Option<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync + Send,
    G: FnMut(T, T) -> T,
{
    let mut parts = map_chunks(len, chunk, map).into_iter();
    let first = parts.next()?;
    Some(parts.fold(first, &mut fold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_map_preserves_order() {
        let out = map_chunks(10, 3, |start, len| (start, len));
        assert_eq!(out, vec![(0, 3), (3, 3), (6, 3), (9, 1)]);
    }

    #[test]
    fn fold_matches_sequential_sum() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let total = fold_chunks(
            v.len(),
            CHUNK_ROWS,
            |s, l| v[s..s + l].iter().sum::<f64>(),
            |a, b| a + b,
        )
        .unwrap();
        // Same chunking done by hand.
        let expected = v
            .chunks(CHUNK_ROWS)
            .map(|c| c.iter().sum::<f64>())
            .fold(0.0, |a, b| a + b);
        assert_eq!(total, expected);
    }

    #[test]
    fn empty_fold_is_none() {
        assert!(fold_chunks(0, 4, |_, _| 1usize, |a, b| a + b).is_none());
    }
}
