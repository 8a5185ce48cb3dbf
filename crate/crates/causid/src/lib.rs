//! Causal effect identification for semi-Markovian diagrams: file formats,
//! a numeric oracle built on random discrete causal models, and the
//! command-line driver. The algorithms live in `causid-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod io;
pub mod oracle;

pub use causid_core as core;
