//! Proportional binning of the randomness alphabets.
//!
//! Given an estimated conditional `Qhat(y|x)`, the output alphabet is split
//! into contiguous bins of width `beta`. For every input `x` the
//! common-randomness alphabet `K` is partitioned so each output bin receives
//! a share proportional to its conditional mass, and within each output bin
//! the local-randomness alphabet `L` is partitioned across the bin's members
//! proportional to their in-bin conditional mass. The two ratios multiply
//! back to `Qhat(y|x)` up to quantization.
//!
//! All "approximately proportional" steps are realized by cumulative
//! rounding: `end_b = round(size * cdf_b)`. That guarantees disjoint,
//! exhaustive partitions with at most one index of error per boundary.
//!
//! The partitions induce a deterministic decoder `(x, k, l) -> y`, used both
//! to label training data and as a non-neural reference system.

use std::ops::Range;

use thiserror::Error;

use crate::exec;
use crate::ioutil::{self, ByteReader};
use crate::probability::{ConditionalPmf, JointPmf, PmfError};

#[derive(Debug, Error)]
pub enum BinError {
    #[error("negative probability at index {0}")]
    NegativeProbability(usize),
    #[error("probabilities sum to {0}, expected 1")]
    BadProbabilitySum(f64),
    #[error("allocation target size must be >= 1")]
    ZeroSize,
    #[error("bin width {beta} must be a power of two dividing {side}")]
    BadBeta { beta: u64, side: u64 },
    #[error("k_size and l_size must be >= 1")]
    EmptyAlphabet,
    #[error("empty K-bin for x={x}, output bin {bin} (empty K-bins disallowed)")]
    EmptyKBin { x: usize, bin: usize },
    #[error("cannot make {ranges} ranges nonempty with only {size} indices")]
    RepairImpossible { ranges: usize, size: u64 },
    #[error("blocklength mismatch: bins built for n={expected}, got n={got}")]
    BlocklenMismatch { expected: usize, got: usize },
    #[error("index ({what} = {value}) out of range")]
    IndexOutOfRange { what: &'static str, value: u64 },
    #[error("l={l} falls in no range for x={x}, output bin {bin}")]
    DecodeGap { x: usize, bin: usize, l: u64 },
    #[error("enumeration budget exceeded: |X||K||L| = 2^{bits:.1} > 2^30")]
    BudgetExceeded { bits: f64 },
    #[error("malformed binning file: {0}")]
    Format(String),
    #[error(transparent)]
    Pmf(#[from] PmfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Configuration for [`build_bins`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinningConfig {
    /// Output-bin width; a power of two dividing `2^n`.
    pub beta: u64,
    /// `|K|`, the common-randomness alphabet size.
    pub k_size: u64,
    /// `|L|`, the local-randomness alphabet size.
    pub l_size: u64,
    /// Permit output bins that receive no K indices. When false, such a bin
    /// aborts the construction.
    pub allow_empty_k: bool,
    /// Permit outputs that receive no L indices. When false the allocation
    /// forces a minimum size of one by stealing from the largest range.
    pub allow_empty_l: bool,
}

impl Default for BinningConfig {
    fn default() -> Self {
        // Empty L-bins help (zero-probability outputs should stay
        // unreachable); empty K-bins are a mixed bag, so they stay fatal
        // unless opted into.
        Self {
            beta: 1,
            k_size: 1,
            l_size: 1,
            allow_empty_k: false,
            allow_empty_l: true,
        }
    }
}

/// Contiguous partition of the output alphabet into `2^n / beta` intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputBins {
    n: usize,
    beta: u64,
}

impl OutputBins {
    pub fn new(n: usize, beta: u64) -> Result<Self, BinError> {
        let side = 1u64 << n;
        if beta == 0 || !beta.is_power_of_two() || beta > side {
            return Err(BinError::BadBeta { beta, side });
        }
        Ok(Self { n, beta })
    }

    pub fn count(&self) -> usize {
        ((1u64 << self.n) / self.beta) as usize
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    /// Output interval of bin `b` (0-indexed).
    pub fn interval(&self, b: usize) -> Range<u64> {
        let start = b as u64 * self.beta;
        start..start + self.beta
    }

    /// Bin containing output `y`.
    pub fn bin_of(&self, y: u64) -> usize {
        (y / self.beta) as usize
    }
}

/// Per-input partitions of the K alphabet, one contiguous (possibly empty)
/// range per output bin, stored as exclusive boundary lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KBinning {
    size: u64,
    ends: Vec<Vec<u64>>,
}

impl KBinning {
    pub fn range(&self, x: usize, b: usize) -> Range<u64> {
        let ends = &self.ends[x];
        let start = if b == 0 { 0 } else { ends[b - 1] };
        start..ends[b]
    }

    /// Output bin whose K-range contains `k`.
    pub fn bin_containing(&self, x: usize, k: u64) -> usize {
        self.ends[x].partition_point(|&e| e <= k)
    }

    pub fn size(&self) -> u64 {
        self.size
    }
}

/// Per-(input, output-bin) partitions of the L alphabet across the bin's
/// members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LBinning {
    size: u64,
    beta: u64,
    /// `ends[x][b]` has `beta` exclusive boundaries, one per member of bin b.
    ends: Vec<Vec<Vec<u64>>>,
}

impl LBinning {
    pub fn range(&self, x: usize, b: usize, member: usize) -> Range<u64> {
        let ends = &self.ends[x][b];
        let start = if member == 0 { 0 } else { ends[member - 1] };
        start..ends[member]
    }

    /// Bin member whose L-range contains `l`, if any.
    pub fn member_containing(&self, x: usize, b: usize, l: u64) -> Option<usize> {
        let ends = &self.ends[x][b];
        let idx = ends.partition_point(|&e| e <= l);
        if idx < ends.len() {
            Some(idx)
        } else {
            None
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }
}

/// The full binning structure produced by [`build_bins`].
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    n: usize,
    config: BinningConfig,
    output: OutputBins,
    k: KBinning,
    l: LBinning,
}

/// Partitions `[0, size)` into `probs.len()` contiguous ranges whose sizes
/// are proportional to `probs`, via cumulative rounding of the scaled CDF.
/// Each range's size deviates from `probs[b] * size` by at most one index.
pub fn allocate_proportional(probs: &[f64], size: u64) -> Result<Vec<Range<u64>>, BinError> {
    let ends = allocate_ends(probs, size)?;
    Ok(ends_to_ranges(&ends))
}

fn ends_to_ranges(ends: &[u64]) -> Vec<Range<u64>> {
    let mut start = 0;
    ends.iter()
        .map(|&e| {
            let r = start..e;
            start = e;
            r
        })
        .collect()
}

fn allocate_ends(probs: &[f64], size: u64) -> Result<Vec<u64>, BinError> {
    if size == 0 {
        return Err(BinError::ZeroSize);
    }
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) {
            return Err(BinError::NegativeProbability(i));
        }
        total += p;
    }
    if !(total > 0.0) || total > 1.0 + 1e-9 {
        return Err(BinError::BadProbabilitySum(total));
    }
    let mut ends = Vec::with_capacity(probs.len());
    let mut cdf = 0.0;
    let mut prev = 0u64;
    for &p in probs {
        cdf += p;
        let e = ((size as f64) * (cdf / total)).round() as u64;
        let e = e.clamp(prev, size);
        ends.push(e);
        prev = e;
    }
    // The scaled CDF ends exactly at `size`; force it in case of rounding.
    *ends.last_mut().expect("nonempty probs") = size;
    Ok(ends)
}

/// Gives every range at least one index by repeatedly moving a single index
/// from the largest range (lowest index on ties) toward the first empty one.
/// Ranges strictly between donor and receiver keep their sizes.
fn repair_nonempty(ends: &mut [u64], size: u64) -> Result<(), BinError> {
    let m = ends.len();
    if size < m as u64 {
        return Err(BinError::RepairImpossible { ranges: m, size });
    }
    loop {
        let sizes: Vec<u64> = (0..m)
            .map(|b| ends[b] - if b == 0 { 0 } else { ends[b - 1] })
            .collect();
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return Ok(());
        };
        let donor = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("nonempty sizes");
        debug_assert!(sizes[donor] >= 2);
        if donor < empty {
            for e in &mut ends[donor..empty] {
                *e -= 1;
            }
        } else {
            for e in &mut ends[empty..donor] {
                *e += 1;
            }
        }
    }
}

/// Builds output bins, K-binnings, and L-binnings for the estimated
/// conditional target.
pub fn build_bins(qhat: &ConditionalPmf, cfg: &BinningConfig) -> Result<Binning, BinError> {
    let side = 1u64 << qhat.n();
    if cfg.beta == 0 || !cfg.beta.is_power_of_two() || side % cfg.beta != 0 {
        return Err(BinError::BadBeta {
            beta: cfg.beta,
            side,
        });
    }
    if cfg.k_size == 0 || cfg.l_size == 0 {
        return Err(BinError::EmptyAlphabet);
    }
    let output = OutputBins::new(qhat.n(), cfg.beta)?;
    let bins_count = output.count();
    let beta = cfg.beta as usize;

    type PerInput = (Vec<u64>, Vec<Vec<u64>>);
    let per_x: Vec<Result<PerInput, BinError>> = exec::map_indexed(side as usize, |x| {
        let row = qhat.row(x);
        let bin_probs: Vec<f64> = (0..bins_count)
            .map(|b| row[b * beta..(b + 1) * beta].iter().sum())
            .collect();
        let k_ends = allocate_ends(&bin_probs, cfg.k_size)?;
        if !cfg.allow_empty_k {
            let mut prev = 0;
            for (b, &e) in k_ends.iter().enumerate() {
                if e == prev {
                    return Err(BinError::EmptyKBin { x, bin: b });
                }
                prev = e;
            }
        }
        let mut l_ends = Vec::with_capacity(bins_count);
        for (b, &mass) in bin_probs.iter().enumerate() {
            let members = &row[b * beta..(b + 1) * beta];
            // A zero-mass bin is unreachable through K; its L-partition only
            // needs to exist, so fall back to uniform.
            let cond: Vec<f64> = if mass > 0.0 {
                members.iter().map(|&v| v / mass).collect()
            } else {
                vec![1.0 / beta as f64; beta]
            };
            let mut ends = allocate_ends(&cond, cfg.l_size)?;
            if !cfg.allow_empty_l {
                repair_nonempty(&mut ends, cfg.l_size)?;
            }
            l_ends.push(ends);
        }
        Ok((k_ends, l_ends))
    });

    let mut k_ends = Vec::with_capacity(side as usize);
    let mut l_ends = Vec::with_capacity(side as usize);
    for r in per_x {
        let (k, l) = r?;
        k_ends.push(k);
        l_ends.push(l);
    }
    Ok(Binning {
        n: qhat.n(),
        config: *cfg,
        output,
        k: KBinning {
            size: cfg.k_size,
            ends: k_ends,
        },
        l: LBinning {
            size: cfg.l_size,
            beta: cfg.beta,
            ends: l_ends,
        },
    })
}

impl Binning {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &BinningConfig {
        &self.config
    }

    pub fn output_bins(&self) -> &OutputBins {
        &self.output
    }

    pub fn k_bins(&self) -> &KBinning {
        &self.k
    }

    pub fn l_bins(&self) -> &LBinning {
        &self.l
    }

    pub fn side(&self) -> u64 {
        1 << self.n
    }

    /// The deterministic decoder induced by the bins: selects the output bin
    /// whose K-range contains `k`, then the member whose L-range contains
    /// `l`. A gap is reported, never silently remapped.
    pub fn decode(&self, x: u64, k: u64, l: u64) -> Result<u64, BinError> {
        if x >= self.side() {
            return Err(BinError::IndexOutOfRange { what: "x", value: x });
        }
        if k >= self.k.size {
            return Err(BinError::IndexOutOfRange { what: "k", value: k });
        }
        if l >= self.l.size {
            return Err(BinError::IndexOutOfRange { what: "l", value: l });
        }
        let x = x as usize;
        let b = self.k.bin_containing(x, k);
        match self.l.member_containing(x, b, l) {
            Some(member) => Ok(self.output.interval(b).start + member as u64),
            None => Err(BinError::DecodeGap { x, bin: b, l }),
        }
    }

    /// Exact synthesized joint distribution of the induced decoder under the
    /// given input marginal and uniform K, L: enumerates every `(x, k, l)`
    /// combination, walking the contiguous ranges so each pair is visited
    /// once.
    pub fn induced_pmf(&self, input_marginal: &[f64]) -> Result<JointPmf, BinError> {
        let side = self.side();
        assert_eq!(input_marginal.len(), side as usize);
        let bits = (side as f64).log2() + (self.k.size as f64).log2() + (self.l.size as f64).log2();
        if bits > 30.0 {
            return Err(BinError::BudgetExceeded { bits });
        }
        let weight_scale = 1.0 / (self.k.size as f64 * self.l.size as f64);
        let rows: Vec<Vec<f64>> = exec::map_indexed(side as usize, |x| {
            let w = input_marginal[x] * weight_scale;
            let mut row = vec![0.0; side as usize];
            for b in 0..self.output.count() {
                let k_count = {
                    let r = self.k.range(x, b);
                    r.end - r.start
                };
                if k_count == 0 {
                    continue;
                }
                for _k in 0..k_count {
                    for member in 0..self.output.beta() as usize {
                        let y = self.output.interval(b).start + member as u64;
                        let l_range = self.l.range(x, b, member);
                        for _l in l_range {
                            row[y as usize] += w;
                        }
                    }
                }
            }
            row
        });
        let probs: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(JointPmf::new(self.n, probs)?)
    }

    // -- RDFB serialization ---------------------------------------------

    const MAGIC: &'static [u8; 4] = b"RDFB";
    const VERSION: u16 = 1;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&Self::VERSION.to_le_bytes());
        out.push(self.n as u8);
        out.extend_from_slice(&self.config.beta.to_le_bytes());
        out.extend_from_slice(&self.config.k_size.to_le_bytes());
        out.extend_from_slice(&self.config.l_size.to_le_bytes());
        let flags =
            u8::from(self.config.allow_empty_k) | (u8::from(self.config.allow_empty_l) << 1);
        out.push(flags);
        for x in 0..self.side() as usize {
            for &e in &self.k.ends[x] {
                out.extend_from_slice(&e.to_le_bytes());
            }
            for b in 0..self.output.count() {
                for &e in &self.l.ends[x][b] {
                    out.extend_from_slice(&e.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), BinError> {
        ioutil::atomic_write(path, &self.to_bytes())?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BinError> {
        let mut r = ByteReader::new(bytes);
        if r.take(4).map_err(|_| BinError::Format("truncated".into()))? != Self::MAGIC {
            return Err(BinError::Format("bad magic".into()));
        }
        let version = r.u16().map_err(|e| BinError::Format(e.to_string()))?;
        if version != Self::VERSION {
            return Err(BinError::Format(format!("unsupported version {version}")));
        }
        let truncated = |e: std::io::Error| BinError::Format(e.to_string());
        let n = r.u8().map_err(truncated)? as usize;
        let beta = r.u64().map_err(truncated)?;
        let k_size = r.u64().map_err(truncated)?;
        let l_size = r.u64().map_err(truncated)?;
        let flags = r.u8().map_err(truncated)?;
        if n == 0 || n > JointPmf::MAX_BLOCKLEN {
            return Err(BinError::Format(format!("bad blocklength {n}")));
        }
        let config = BinningConfig {
            beta,
            k_size,
            l_size,
            allow_empty_k: flags & 1 != 0,
            allow_empty_l: flags & 2 != 0,
        };
        let output = OutputBins::new(n, beta)?;
        if k_size == 0 || l_size == 0 {
            return Err(BinError::EmptyAlphabet);
        }
        let side = 1usize << n;
        let bins_count = output.count();
        let read_ends = |r: &mut ByteReader, count: usize, size: u64| -> Result<Vec<u64>, BinError> {
            let mut ends = Vec::with_capacity(count);
            let mut prev = 0u64;
            for _ in 0..count {
                let e = r.u64().map_err(|e| BinError::Format(e.to_string()))?;
                if e < prev || e > size {
                    return Err(BinError::Format("boundaries not monotone".into()));
                }
                ends.push(e);
                prev = e;
            }
            if ends.last() != Some(&size) {
                return Err(BinError::Format("partition does not cover alphabet".into()));
            }
            Ok(ends)
        };
        let mut k_ends = Vec::with_capacity(side);
        let mut l_ends = Vec::with_capacity(side);
        for _ in 0..side {
            k_ends.push(read_ends(&mut r, bins_count, k_size)?);
            let mut per_bin = Vec::with_capacity(bins_count);
            for _ in 0..bins_count {
                per_bin.push(read_ends(&mut r, beta as usize, l_size)?);
            }
            l_ends.push(per_bin);
        }
        if !r.done() {
            return Err(BinError::Format("trailing bytes".into()));
        }
        Ok(Self {
            n,
            config,
            output,
            k: KBinning {
                size: k_size,
                ends: k_ends,
            },
            l: LBinning {
                size: l_size,
                beta,
                ends: l_ends,
            },
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, BinError> {
        Self::from_bytes(&ioutil::read_all(path)?)
    }
}
