//! Core algorithms for building out-of-distribution reaction prediction
//! benchmarks: SMILES handling, corpus cleaning, split construction,
//! top-k scoring and fingerprint-space shift analysis.
//!
//! The crate is `no_std` (with `alloc`); file formats, parallelism and the
//! command line live in the `rxnsplit` crate.

#![no_std]

extern crate alloc;

pub mod chem;
pub mod corpus;
pub mod splits;
pub mod shift;
pub mod eval;
