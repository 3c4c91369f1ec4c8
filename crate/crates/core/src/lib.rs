//! Non-binary LDPC coded modulation with probabilistic amplitude shaping
//! over the AWGN channel.

pub mod airs;
pub mod analysis;
pub mod cli;
pub mod code;
pub mod decoder;
pub mod demap;
pub mod error;
pub mod galois;
pub mod mapping;
pub mod matcher;
pub mod pas;

pub use error::{Error, Result};
