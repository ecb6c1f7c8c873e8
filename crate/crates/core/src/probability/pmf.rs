//! Dense PMF tables over length-`n` binary sequence alphabets.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::PMF_TOL;
use crate::ioutil;

#[derive(Debug, Error)]
pub enum PmfError {
    #[error("table shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("entry ({x},{y}) is negative: {value}")]
    NegativeEntry { x: usize, y: usize, value: f64 },
    #[error("table sums to {sum}, expected 1")]
    SumNotOne { sum: f64 },
    #[error("row {x} sums to {sum}, expected 1")]
    RowSumNotOne { x: usize, sum: f64 },
    #[error("dimension {0} is not 2^n for the stated blocklength")]
    BadDimensions(usize),
    #[error("crossover probability {0} outside [0,1]")]
    BadCrossover(f64),
    #[error("empty sample set")]
    EmptySamples,
    #[error("sample ({x},{y}) out of range for blocklength {n}")]
    SampleOutOfRange { x: u64, y: u64, n: usize },
    #[error("support violation at ({x},{y}): p={p} but q=0")]
    SupportViolation { x: usize, y: usize, p: f64 },
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Joint PMF over pairs of length-`n` binary sequences, stored dense and
/// row-major: `probs[x * 2^n + y]`.
///
/// Invariants: every entry is nonnegative and the table sums to one within
/// [`PMF_TOL`]. Blocklengths are capped at `n <= 16` so the table always fits
/// comfortably in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    n: usize,
    probs: Vec<f64>,
}

impl JointPmf {
    pub const MAX_BLOCKLEN: usize = 16;

    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self, PmfError> {
        let side = Self::side_len(n)?;
        if probs.len() != side * side {
            return Err(PmfError::BadDimensions(probs.len()));
        }
        let pmf = Self { n, probs };
        pmf.validate()?;
        Ok(pmf)
    }

    fn side_len(n: usize) -> Result<usize, PmfError> {
        if n == 0 || n > Self::MAX_BLOCKLEN {
            return Err(PmfError::BadDimensions(n));
        }
        Ok(1usize << n)
    }

    fn validate(&self) -> Result<(), PmfError> {
        let side = self.side();
        let mut sum = 0.0;
        for x in 0..side {
            for y in 0..side {
                let v = self.probs[x * side + y];
                if !(v >= 0.0) {
                    return Err(PmfError::NegativeEntry { x, y, value: v });
                }
                sum += v;
            }
        }
        if (sum - 1.0).abs() > PMF_TOL {
            return Err(PmfError::SumNotOne { sum });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Alphabet size per side, `2^n`.
    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.side() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let side = self.side();
        &self.probs[x * side..(x + 1) * side]
    }

    /// Marginal over the first coordinate.
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.side()).map(|x| self.row(x).iter().sum()).collect()
    }

    /// Marginal over the second coordinate.
    pub fn y_marginal(&self) -> Vec<f64> {
        let side = self.side();
        let mut m = vec![0.0; side];
        for x in 0..side {
            for (y, v) in self.row(x).iter().enumerate() {
                m[y] += v;
            }
        }
        m
    }

    /// Conditional table `Pr[y | x]`. Fails on an all-zero row.
    pub fn conditional(&self) -> Result<ConditionalPmf, PmfError> {
        let side = self.side();
        let mut probs = Vec::with_capacity(side * side);
        for x in 0..side {
            let mass: f64 = self.row(x).iter().sum();
            if mass <= 0.0 {
                return Err(PmfError::RowSumNotOne { x, sum: mass });
            }
            probs.extend(self.row(x).iter().map(|v| v / mass));
        }
        ConditionalPmf::new(self.n, probs)
    }

    /// Writes the table as CSV (`x,y,prob`, row-major over x then y).
    /// Probabilities are printed with 17 significant digits so the file
    /// round-trips the exact f64 values.
    pub fn save_csv(&self, path: &Path) -> Result<(), PmfError> {
        let side = self.side();
        let mut out = String::with_capacity(side * side * 24 + 16);
        out.push_str("x,y,prob\n");
        for x in 0..side {
            for y in 0..side {
                writeln!(out, "{x},{y},{:.16e}", self.get(x, y)).expect("string write");
            }
        }
        ioutil::atomic_write(path, out.as_bytes())?;
        Ok(())
    }

    /// Loads a CSV written by [`JointPmf::save_csv`] and re-validates every
    /// invariant.
    pub fn load_csv(path: &Path) -> Result<Self, PmfError> {
        let text = String::from_utf8_lossy(&ioutil::read_all(path)?).into_owned();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "x,y,prob")) => {}
            _ => {
                return Err(PmfError::Csv {
                    line: 1,
                    reason: "missing `x,y,prob` header".into(),
                })
            }
        }
        let mut cells = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>, what: &str| -> Result<f64, PmfError> {
                s.and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| PmfError::Csv {
                        line: idx + 1,
                        reason: format!("bad {what}"),
                    })
            };
            let x = parse(parts.next(), "x")? as usize;
            let y = parse(parts.next(), "y")? as usize;
            let p = parse(parts.next(), "prob")?;
            cells.push((x, y, p));
        }
        let count = cells.len();
        let side = (count as f64).sqrt().round() as usize;
        if side * side != count || !side.is_power_of_two() {
            return Err(PmfError::BadDimensions(count));
        }
        let n = side.trailing_zeros() as usize;
        let mut probs = vec![f64::NAN; count];
        for (x, y, p) in cells {
            if x >= side || y >= side {
                return Err(PmfError::SampleOutOfRange {
                    x: x as u64,
                    y: y as u64,
                    n,
                });
            }
            probs[x * side + y] = p;
        }
        Self::new(n, probs)
    }
}

/// Conditional PMF `Pr[y | x]` with the same dense layout as [`JointPmf`];
/// every row sums to one within [`PMF_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPmf {
    n: usize,
    probs: Vec<f64>,
}

impl ConditionalPmf {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self, PmfError> {
        let side = JointPmf::side_len(n)?;
        if probs.len() != side * side {
            return Err(PmfError::BadDimensions(probs.len()));
        }
        for x in 0..side {
            let mut sum = 0.0;
            for y in 0..side {
                let v = probs[x * side + y];
                if !(v >= 0.0) {
                    return Err(PmfError::NegativeEntry { x, y, value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > PMF_TOL {
                return Err(PmfError::RowSumNotOne { x, sum });
            }
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.side() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let side = self.side();
        &self.probs[x * side..(x + 1) * side]
    }

    /// Joint table under a uniform input marginal.
    pub fn joint_uniform_input(&self) -> JointPmf {
        let side = self.side();
        let w = 1.0 / side as f64;
        let probs = self.probs.iter().map(|v| v * w).collect();
        JointPmf::new(self.n, probs).expect("scaled conditional is a valid joint")
    }
}

/// Joint PMF of a memoryless binary symmetric channel with crossover `p` and
/// uniform input: `Pr[x,y] = 2^-n * p^d * (1-p)^(n-d)` with `d` the Hamming
/// distance between the sequences.
pub fn bsc_joint(n: usize, p: f64) -> Result<JointPmf, PmfError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PmfError::BadCrossover(p));
    }
    let side = JointPmf::side_len(n)?;
    // p^d (1-p)^(n-d) for d = 0..=n, computed once.
    let mut by_distance = vec![0.0; n + 1];
    for (d, slot) in by_distance.iter_mut().enumerate() {
        *slot = p.powi(d as i32) * (1.0 - p).powi((n - d) as i32);
    }
    let scale = 1.0 / side as f64;
    let mut probs = vec![0.0; side * side];
    for x in 0..side {
        for y in 0..side {
            let d = (x ^ y).count_ones() as usize;
            probs[x * side + y] = scale * by_distance[d];
        }
    }
    JointPmf::new(n, probs)
}

/// Conditional of the same channel, `Pr[y|x] = p^d (1-p)^(n-d)`.
pub fn bsc_conditional(n: usize, p: f64) -> Result<ConditionalPmf, PmfError> {
    let joint = bsc_joint(n, p)?;
    let side = joint.side();
    let probs = joint.probs().iter().map(|v| v * side as f64).collect();
    ConditionalPmf::new(n, probs)
}

/// Relative-frequency joint estimate from `(x, y)` index pairs. Zero counts
/// stay exactly zero; nothing is smoothed.
pub fn empirical_joint(samples: &[(u64, u64)], n: usize) -> Result<JointPmf, PmfError> {
    if samples.is_empty() {
        return Err(PmfError::EmptySamples);
    }
    let side = JointPmf::side_len(n)?;
    let mut counts = vec![0u64; side * side];
    for &(x, y) in samples {
        if x >= side as u64 || y >= side as u64 {
            return Err(PmfError::SampleOutOfRange { x, y, n });
        }
        counts[x as usize * side + y as usize] += 1;
    }
    let inv = 1.0 / samples.len() as f64;
    JointPmf::new(n, counts.iter().map(|&c| c as f64 * inv).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsc_joint_n1_quarter() {
        let pmf = bsc_joint(1, 0.25).unwrap();
        assert_eq!(pmf.probs(), &[0.375, 0.125, 0.125, 0.375]);
    }

    #[test]
    fn bsc_joint_noiseless_is_diagonal() {
        let pmf = bsc_joint(2, 0.0).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let expect = if x == y { 0.25 } else { 0.0 };
                assert_eq!(pmf.get(x, y), expect);
            }
        }
    }

    #[test]
    fn bsc_conditional_rows_sum_to_one() {
        for n in 1..=4 {
            for &p in &[0.0, 0.11, 0.25, 0.5, 0.9] {
                let c = bsc_conditional(n, p).unwrap();
                for x in 0..c.side() {
                    let s: f64 = c.row(x).iter().sum();
                    assert!((s - 1.0).abs() < 1e-12, "n={n} p={p} x={x} sum={s}");
                }
            }
        }
    }

    #[test]
    fn empirical_joint_counts() {
        let pmf = empirical_joint(&[(0, 0), (0, 0), (0, 1), (1, 1)], 1).unwrap();
        assert_eq!(pmf.probs(), &[0.5, 0.25, 0.0, 0.25]);
    }

    #[test]
    fn empirical_joint_point_mass() {
        let pmf = empirical_joint(&[(0, 0); 5], 1).unwrap();
        assert_eq!(pmf.get(0, 0), 1.0);
    }

    #[test]
    fn empirical_joint_rejects_empty_and_out_of_range() {
        assert!(matches!(
            empirical_joint(&[], 1),
            Err(PmfError::EmptySamples)
        ));
        assert!(matches!(
            empirical_joint(&[(2, 0)], 1),
            Err(PmfError::SampleOutOfRange { .. })
        ));
    }

    #[test]
    fn invariants_rejected() {
        assert!(JointPmf::new(1, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(JointPmf::new(1, vec![0.5, 0.5, 0.5, 0.1]).is_err());
        assert!(JointPmf::new(1, vec![1.0]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pmf.csv");
        let pmf = bsc_joint(3, 0.11).unwrap();
        pmf.save_csv(&path).unwrap();
        let back = JointPmf::load_csv(&path).unwrap();
        assert_eq!(pmf, back);
    }

    #[test]
    fn csv_loader_validates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,y,prob\n0,0,0.9\n0,1,0.3\n1,0,0.0\n1,1,0.0\n").unwrap();
        assert!(matches!(
            JointPmf::load_csv(&path),
            Err(PmfError::SumNotOne { .. })
        ));
    }

    #[test]
    fn conditional_requires_positive_rows() {
        let pmf = JointPmf::new(1, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(pmf.conditional().is_err());
    }
}
