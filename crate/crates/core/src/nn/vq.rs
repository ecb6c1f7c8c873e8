//! Vector quantizer with a fixed binary-corner codebook.
//!
//! The codebook is the `2^dim` corners of the unit hypercube, indexed so
//! that component `c` of point `i` is bit `dim-1-c` of `i` (most significant
//! bit first). The encoder's sigmoid output lives in `(0,1)^dim`, so nearest
//! neighbour in L2 over the corners reduces to elementwise thresholding at
//! 0.5, with exact ties resolving to 0 — the lowest tied index.

use super::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerCodebook {
    dim: usize,
}

impl CornerCodebook {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= 63, "codebook dimension out of range");
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> u64 {
        1 << self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Codebook point for `index`, MSB-first.
    pub fn point<T: Scalar>(&self, index: u64) -> Vec<T> {
        assert!(index < self.len());
        (0..self.dim)
            .map(|c| {
                if index >> (self.dim - 1 - c) & 1 == 1 {
                    T::ONE
                } else {
                    T::ZERO
                }
            })
            .collect()
    }

    /// Quantizes `latent` into `out`, returning the codebook index.
    pub fn quantize_into<T: Scalar>(&self, latent: &[T], out: &mut [T]) -> u64 {
        assert_eq!(latent.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        let half = T::from_f64(0.5);
        let mut index = 0u64;
        for c in 0..self.dim {
            let bit = latent[c] > half;
            out[c] = if bit { T::ONE } else { T::ZERO };
            if bit {
                index |= 1 << (self.dim - 1 - c);
            }
        }
        index
    }
}

/// Nearest codebook point to `latent` (argmin of the L2 distance, ties to
/// the lowest index) and its index.
pub fn vq_quantize<T: Scalar>(latent: &[T], codebook: &CornerCodebook) -> (Vec<T>, u64) {
    let mut out = vec![T::ZERO; codebook.dim()];
    let index = codebook.quantize_into(latent, &mut out);
    (out, index)
}
