//! Channel sampling and dataset assembly.
//!
//! Training data pairs channel samples `(x, y)` with randomness indices
//! `(k, l)` drawn uniformly from the bins the pair maps to, so the network
//! sees inputs that are consistent with the decoder it is meant to imitate.
//! Test data instead draws `k` and `l` uniformly from their full alphabets.
//!
//! Generation is sharded: records `[s * 4096, (s+1) * 4096)` come from the
//! stream `(seed, label, s)` and are emitted in shard order, so output is
//! identical no matter how the shards are scheduled.

use rand::Rng;
use thiserror::Error;

use crate::binning::Binning;
use crate::exec;
use crate::ioutil::{self, ByteReader};
use crate::probability::{ConditionalPmf, PmfError};
use crate::seeds::{self, label};

/// Records per generation shard. Part of the determinism contract: changing
/// it changes which stream each record draws from.
pub const SHARD_RECORDS: usize = 4096;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("count must be >= 1")]
    EmptyRequest,
    #[error("sample ({x},{y}) maps to an empty K-bin (estimate/bins mismatch)")]
    EmptyKBinForSample { x: u64, y: u64 },
    #[error("sample ({x},{y}) maps to an empty L-bin (estimate/bins mismatch)")]
    EmptyLBinForSample { x: u64, y: u64 },
    #[error("sample ({x},{y}) out of range for blocklength {n}")]
    SampleOutOfRange { x: u64, y: u64, n: usize },
    #[error("{what} = {value} is not a power of two")]
    NotPowerOfTwo { what: &'static str, value: u64 },
    #[error("record count {got} does not match header count {expected}")]
    CountMismatch { expected: u64, got: u64 },
    #[error("record index out of range: {0}")]
    RecordOutOfRange(String),
    #[error("malformed dataset file: {0}")]
    Format(String),
    #[error(transparent)]
    Pmf(#[from] PmfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Source channel for `(x, y)` pairs: a BSC or an explicit conditional table.
#[derive(Debug, Clone)]
pub enum Channel {
    Bsc { n: usize, p: f64 },
    Table(ConditionalPmf),
}

impl Channel {
    pub fn n(&self) -> usize {
        match self {
            Channel::Bsc { n, .. } => *n,
            Channel::Table(t) => t.n(),
        }
    }

    fn side(&self) -> u64 {
        1 << self.n()
    }
}

/// I.i.d. draws from the channel under a uniform input: `x` uniform,
/// `y ~ q(.|x)`. Deterministic given `(seed, label)`; the label keeps e.g.
/// train and test draws on separate streams.
pub fn sample_channel(
    channel: &Channel,
    count: usize,
    seed: u64,
    stream_label: &str,
) -> Result<Vec<(u64, u64)>, DataError> {
    if count == 0 {
        return Err(DataError::EmptyRequest);
    }
    let side = channel.side();
    // Per-row CDF for table channels, shared across shards.
    let cdfs: Option<Vec<Vec<f64>>> = match channel {
        Channel::Bsc { .. } => None,
        Channel::Table(t) => Some(
            (0..side as usize)
                .map(|x| {
                    let mut acc = 0.0;
                    t.row(x)
                        .iter()
                        .map(|&p| {
                            acc += p;
                            acc
                        })
                        .collect()
                })
                .collect(),
        ),
    };
    let shards = exec::map_chunks(count, SHARD_RECORDS, |start, len| {
        let mut rng = seeds::stream(seed, stream_label, (start / SHARD_RECORDS) as u64);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let x = rng.random_range(0..side);
            let y = match channel {
                Channel::Bsc { n, p } => {
                    let mut y = x;
                    for bit in 0..*n {
                        if rng.random::<f64>() < *p {
                            y ^= 1 << bit;
                        }
                    }
                    y
                }
                Channel::Table(_) => {
                    let cdf = &cdfs.as_ref().expect("table cdf")[x as usize];
                    let u = rng.random::<f64>();
                    let idx = cdf.partition_point(|&c| c <= u);
                    (idx as u64).min(side - 1)
                }
            };
            out.push((x, y));
        }
        out
    });
    Ok(shards.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Test,
}

/// One training or test record; randomness indices are kept as integers and
/// expanded to binary features only inside the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleRecord {
    pub x: u32,
    pub y: u32,
    pub k: u64,
    pub l: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetHeader {
    pub role: Role,
    pub n: usize,
    /// Common-randomness width in bits; `|K| = 2^nr0_bits`.
    pub nr0_bits: u16,
    /// Local-randomness width in bits; `|L| = 2^nrl_bits`.
    pub nrl_bits: u16,
    pub count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<SampleRecord>,
}

fn bits_of(size: u64, what: &'static str) -> Result<u16, DataError> {
    if !size.is_power_of_two() {
        return Err(DataError::NotPowerOfTwo { what, value: size });
    }
    Ok(size.trailing_zeros() as u16)
}

/// Runs the randomness-attachment step over channel pairs: for each sample,
/// `k` is uniform over the K-range of the output bin containing `y`, and `l`
/// is uniform over the L-range of `y` itself.
pub fn attach_randomness(
    pairs: &[(u64, u64)],
    bins: &Binning,
    seed: u64,
) -> Result<Dataset, DataError> {
    if pairs.is_empty() {
        return Err(DataError::EmptyRequest);
    }
    let n = bins.n();
    let side = bins.side();
    let nr0_bits = bits_of(bins.k_bins().size(), "k_size")?;
    let nrl_bits = bits_of(bins.l_bins().size(), "l_size")?;
    let shards = exec::map_chunks(pairs.len(), SHARD_RECORDS, |start, len| {
        let shard = (start / SHARD_RECORDS) as u64;
        let mut rng_k = seeds::stream(seed, label::ATTACH_K, shard);
        let mut rng_l = seeds::stream(seed, label::ATTACH_L, shard);
        let mut out = Vec::with_capacity(len);
        for &(x, y) in &pairs[start..start + len] {
            if x >= side || y >= side {
                return Err(DataError::SampleOutOfRange { x, y, n });
            }
            let b = bins.output_bins().bin_of(y);
            let kr = bins.k_bins().range(x as usize, b);
            if kr.is_empty() {
                return Err(DataError::EmptyKBinForSample { x, y });
            }
            let member = (y - bins.output_bins().interval(b).start) as usize;
            let lr = bins.l_bins().range(x as usize, b, member);
            if lr.is_empty() {
                return Err(DataError::EmptyLBinForSample { x, y });
            }
            let k = rng_k.random_range(kr);
            let l = rng_l.random_range(lr);
            debug_assert!(bins.k_bins().bin_containing(x as usize, k) == b);
            out.push(SampleRecord {
                x: x as u32,
                y: y as u32,
                k,
                l,
            });
        }
        Ok(out)
    });
    let mut records = Vec::with_capacity(pairs.len());
    for shard in shards {
        records.extend(shard?);
    }
    Ok(Dataset {
        header: DatasetHeader {
            role: Role::Train,
            n,
            nr0_bits,
            nrl_bits,
            count: records.len() as u64,
            seed,
        },
        records,
    })
}

/// Builds a test set: channel pairs plus `k`, `l` drawn uniformly from their
/// full alphabets, independent of everything else.
pub fn make_test_set(
    channel: &Channel,
    count: usize,
    nr0_bits: u16,
    nrl_bits: u16,
    seed: u64,
) -> Result<Dataset, DataError> {
    let pairs = sample_channel(channel, count, seed, label::CHANNEL_TEST)?;
    let k_size = 1u64 << nr0_bits;
    let l_size = 1u64 << nrl_bits;
    let shards = exec::map_chunks(count, SHARD_RECORDS, |start, len| {
        let shard = (start / SHARD_RECORDS) as u64;
        let mut rng_k = seeds::stream(seed, label::TEST_K, shard);
        let mut rng_l = seeds::stream(seed, label::TEST_L, shard);
        let mut out = Vec::with_capacity(len);
        for &(x, y) in &pairs[start..start + len] {
            out.push(SampleRecord {
                x: x as u32,
                y: y as u32,
                k: rng_k.random_range(0..k_size),
                l: rng_l.random_range(0..l_size),
            });
        }
        out
    });
    Ok(Dataset {
        header: DatasetHeader {
            role: Role::Test,
            n: channel.n(),
            nr0_bits,
            nrl_bits,
            count: count as u64,
            seed,
        },
        records: shards.into_iter().flatten().collect(),
    })
}

impl Dataset {
    /// Wraps bare channel pairs as a zero-randomness training dataset (the
    /// persisted form of the sampling stage).
    pub fn from_pairs(pairs: &[(u64, u64)], n: usize, seed: u64) -> Result<Self, DataError> {
        let side = 1u64 << n;
        let mut records = Vec::with_capacity(pairs.len());
        for &(x, y) in pairs {
            if x >= side || y >= side {
                return Err(DataError::SampleOutOfRange { x, y, n });
            }
            records.push(SampleRecord {
                x: x as u32,
                y: y as u32,
                k: 0,
                l: 0,
            });
        }
        Ok(Self {
            header: DatasetHeader {
                role: Role::Train,
                n,
                nr0_bits: 0,
                nrl_bits: 0,
                count: records.len() as u64,
                seed,
            },
            records,
        })
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.records
            .iter()
            .map(|r| (u64::from(r.x), u64::from(r.y)))
            .collect()
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.header.count != self.records.len() as u64 {
            return Err(DataError::CountMismatch {
                expected: self.header.count,
                got: self.records.len() as u64,
            });
        }
        let side = 1u64 << self.header.n;
        let k_size = 1u64 << self.header.nr0_bits;
        let l_size = 1u64 << self.header.nrl_bits;
        for (i, r) in self.records.iter().enumerate() {
            if u64::from(r.x) >= side
                || u64::from(r.y) >= side
                || r.k >= k_size
                || r.l >= l_size
            {
                return Err(DataError::RecordOutOfRange(format!(
                    "record {i}: x={} y={} k={} l={}",
                    r.x, r.y, r.k, r.l
                )));
            }
        }
        Ok(())
    }

    // -- RDFC serialization ---------------------------------------------

    const MAGIC: &'static [u8; 4] = b"RDFC";
    const VERSION: u16 = 1;

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(32 + self.records.len() * 24);
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&Self::VERSION.to_le_bytes());
        out.push(match h.role {
            Role::Train => 0,
            Role::Test => 1,
        });
        out.push(h.n as u8);
        out.extend_from_slice(&h.nr0_bits.to_le_bytes());
        out.extend_from_slice(&h.nrl_bits.to_le_bytes());
        out.extend_from_slice(&h.count.to_le_bytes());
        out.extend_from_slice(&h.seed.to_le_bytes());
        for r in &self.records {
            out.extend_from_slice(&r.x.to_le_bytes());
            out.extend_from_slice(&r.y.to_le_bytes());
            out.extend_from_slice(&r.k.to_le_bytes());
            out.extend_from_slice(&r.l.to_le_bytes());
        }
        out
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), DataError> {
        ioutil::atomic_write(path, &self.to_bytes())?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DataError> {
        let fmt = |e: std::io::Error| DataError::Format(e.to_string());
        let mut r = ByteReader::new(bytes);
        if r.take(4).map_err(fmt)? != Self::MAGIC {
            return Err(DataError::Format("bad magic".into()));
        }
        let version = r.u16().map_err(fmt)?;
        if version != Self::VERSION {
            return Err(DataError::Format(format!("unsupported version {version}")));
        }
        let role = match r.u8().map_err(fmt)? {
            0 => Role::Train,
            1 => Role::Test,
            other => return Err(DataError::Format(format!("bad role byte {other}"))),
        };
        let n = r.u8().map_err(fmt)? as usize;
        let nr0_bits = r.u16().map_err(fmt)?;
        let nrl_bits = r.u16().map_err(fmt)?;
        let count = r.u64().map_err(fmt)?;
        let seed = r.u64().map_err(fmt)?;
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            records.push(SampleRecord {
                x: r.u32().map_err(fmt)?,
                y: r.u32().map_err(fmt)?,
                k: r.u64().map_err(fmt)?,
                l: r.u64().map_err(fmt)?,
            });
        }
        if !r.done() {
            return Err(DataError::Format("trailing bytes".into()));
        }
        let ds = Self {
            header: DatasetHeader {
                role,
                n,
                nr0_bits,
                nrl_bits,
                count,
                seed,
            },
            records,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, DataError> {
        Self::from_bytes(&ioutil::read_all(path)?)
    }
}

#[cfg(test)]
mod tests;
