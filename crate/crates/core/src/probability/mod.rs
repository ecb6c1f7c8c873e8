//! Probability objects and information measures.
//!
//! Everything here is exact arithmetic over dense tables: joint/conditional
//! PMFs on length-`n` binary sequence alphabets, total variation distance and
//! KL divergence, entropy and mutual information (all in bits), and the
//! single-letter rate-region tooling used to sanity-check experiments.

mod divergence;
mod pmf;
mod rate_region;

pub use divergence::{
    binary_entropy, entropy_bits, kl_divergence_bits, total_variation, tvd_slices,
};
pub use pmf::{bsc_conditional, bsc_joint, empirical_joint, ConditionalPmf, JointPmf, PmfError};
pub use rate_region::{
    check_rate_triple, coverage_ratio, format_percent, wci_dsbs, RateRegionCertificate,
    RateTriple, RegionError, TripleDecision,
};

/// Tolerance used by every PMF invariant check (sums, Markov, marginals).
pub const PMF_TOL: f64 = 1e-9;
