//! Dense matrix kernels for the network engine.
//!
//! Register-tiled accumulate kernel: 4 rows by a 32- or 16-wide column tile
//! held in local arrays across the shared dimension, which the
//! auto-vectorizer turns into FMA streams. Everything is plain safe Rust;
//! determinism comes from the fixed loop structure (no reassociation across
//! calls).

use super::scalar::Scalar;

const MR: usize = 4;

/// `c += a * b` with `a` of shape m x k and `b` of shape k x n, all
/// row-major.
pub fn matmul_acc<T: Scalar>(c: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    assert_eq!(c.len(), m * n);
    let mut i = 0;
    while i < m {
        let rows = MR.min(m - i);
        let mut j = 0;
        while j + 32 <= n {
            tile::<T, 32>(c, a, b, i, rows, j, k, n);
            j += 32;
        }
        while j + 16 <= n {
            tile::<T, 16>(c, a, b, i, rows, j, k, n);
            j += 16;
        }
        if j < n {
            tile_edge(c, a, b, i, rows, j, n - j, k, n);
        }
        i += rows;
    }
}

#[inline]
fn tile<T: Scalar, const W: usize>(
    c: &mut [T],
    a: &[T],
    b: &[T],
    i0: usize,
    rows: usize,
    j0: usize,
    k: usize,
    n: usize,
) {
    let mut acc = [[T::ZERO; W]; MR];
    for kk in 0..k {
        let bv: &[T; W] = b[kk * n + j0..kk * n + j0 + W].try_into().unwrap();
        for r in 0..rows {
            let av = a[(i0 + r) * k + kk];
            let accr = &mut acc[r];
            for t in 0..W {
                accr[t] += av * bv[t];
            }
        }
    }
    for (r, accr) in acc.iter().enumerate().take(rows) {
        let crow = &mut c[(i0 + r) * n + j0..(i0 + r) * n + j0 + W];
        for t in 0..W {
            crow[t] += accr[t];
        }
    }
}

#[inline]
fn tile_edge<T: Scalar>(
    c: &mut [T],
    a: &[T],
    b: &[T],
    i0: usize,
    rows: usize,
    j0: usize,
    width: usize,
    k: usize,
    n: usize,
) {
    let mut acc = [[T::ZERO; 16]; MR];
    for kk in 0..k {
        let bv = &b[kk * n + j0..kk * n + j0 + width];
        for r in 0..rows {
            let av = a[(i0 + r) * k + kk];
            let accr = &mut acc[r];
            for (t, &bt) in bv.iter().enumerate() {
                accr[t] += av * bt;
            }
        }
    }
    for (r, accr) in acc.iter().enumerate().take(rows) {
        let crow = &mut c[(i0 + r) * n + j0..(i0 + r) * n + j0 + width];
        for (t, ct) in crow.iter_mut().enumerate() {
            *ct += accr[t];
        }
    }
}

/// Row-major transpose into a fresh vector.
pub fn transpose<T: Scalar>(src: &[T], rows: usize, cols: usize) -> Vec<T> {
    assert_eq!(src.len(), rows * cols);
    let mut out = vec![T::ZERO; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn naive<T: Scalar>(a: &[T], b: &[T], m: usize, k: usize, n: usize) -> Vec<T> {
        let mut c = vec![T::ZERO; m * n];
        for i in 0..m {
            for kk in 0..k {
                let av = a[i * k + kk];
                for j in 0..n {
                    c[i * n + j] += av * b[kk * n + j];
                }
            }
        }
        c
    }

    #[test]
    fn matches_naive_on_odd_shapes() {
        let mut rng = crate::seeds::stream(1, "test/gemm", 0);
        for &(m, k, n) in &[
            (1, 1, 1),
            (3, 5, 7),
            (4, 16, 16),
            (5, 24, 96),
            (7, 19, 33),
            (64, 96, 3),
            (9, 7, 48),
            (2, 3, 61),
        ] {
            let a: Vec<f64> = (0..m * k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..k * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut c = vec![0.0f64; m * n];
            matmul_acc(&mut c, &a, &b, m, k, n);
            let want = naive(&a, &b, m, k, n);
            for (got, expect) in c.iter().zip(&want) {
                assert!((got - expect).abs() < 1e-12, "{m}x{k}x{n}");
            }
        }
    }

    #[test]
    fn accumulates_into_existing_values() {
        let a = [1.0f64, 2.0];
        let b = [3.0f64, 4.0];
        let mut c = [10.0f64];
        matmul_acc(&mut c, &a, &b, 1, 2, 1);
        assert_eq!(c[0], 10.0 + 11.0);
    }

    #[test]
    fn transpose_round_trip() {
        let src: Vec<f64> = (0..12).map(|v| v as f64).collect();
        let t = transpose(&src, 3, 4);
        let back = transpose(&t, 4, 3);
        assert_eq!(src, back);
        assert_eq!(t[1], src[4]);
    }
}
