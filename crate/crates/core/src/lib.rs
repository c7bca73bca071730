//! Two-party cryptography in the noisy-storage model.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`] – packed bit strings shared by every other module.
//! * [`qsim`] – symbolic BB84 registers and small exact density operators.
//! * [`channels`] – storage channel models, capacities and strong-converse exponents.
//! * [`secparams`] – every security parameter, threshold and trade-off curve.
//! * [`hashing`] – Toeplitz 2-universal hashing and privacy amplification.
//! * [`coding`] – Reed–Solomon derived binary codes and their syndromes.
//! * [`ihash`] – subset encodings and interactive hashing.
//! * [`protocols`] – weak string erasure, commitment and oblivious transfer engines.
//! * [`attacks`] – adversary strategies, Monte Carlo harness and exact entropy oracles.

pub mod attacks;
pub mod bits;
pub mod channels;
pub mod coding;
pub mod error;
pub mod hashing;
pub mod ihash;
pub mod protocols;
pub mod qsim;
pub mod secparams;

pub use bits::BitString;
pub use error::{Error, Result};
