//! Distributed channel synthesis toolkit.
//!
//! The crate covers the full experiment loop for synthesizing a target
//! conditional distribution with an encoder-decoder pair driven by common
//! and local randomness:
//!
//! * [`probability`] — dense PMF types, divergences, mutual information, and
//!   the rate-region machinery (achievability bounds, Wyner common
//!   information for the doubly symmetric binary source).
//! * [`binning`] — proportional binning of the common/local randomness
//!   alphabets against an estimated target, plus the deterministic decoder
//!   the bins induce.
//! * [`datagen`] — seeded channel sampling and training/test set assembly.
//! * [`nn`] — a small from-scratch dense-network engine with a fixed-codebook
//!   vector-quantizer bottleneck, Adam, and a reduce-on-plateau schedule.
//! * [`pipeline`] — end-to-end experiment orchestration and reporting.
//!
//! All randomness is derived from a single master seed via labeled streams
//! ([`seeds`]), and every parallel loop folds in a fixed order ([`exec`]), so
//! results are bit-identical across thread counts and across the `parallel`
//! feature being on or off.

pub mod binning;
pub mod datagen;
pub mod exec;
pub mod ioutil;
pub mod nn;
// pub mod pipeline;
pub mod probability;
pub mod seeds;
