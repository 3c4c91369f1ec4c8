use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field bit-width {0} out of range (1..=16)")]
    FieldWidth(u32),
    #[error("polynomial {poly:#x} is not a degree-{p} primitive polynomial")]
    NotPrimitive { p: u32, poly: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("expected {expected} bits, got {got}")]
    BitLength { expected: usize, got: usize },
    #[error("constellation bits per symbol {0} out of range (1..=8)")]
    ConstellationBits(u32),
    #[error("target amplitude entropy {target} outside (0, {max}]")]
    EntropyTarget { target: f64, max: f64 },
    #[error("degenerate distribution: {0}")]
    Distribution(String),
    #[error("negative SNR {0}")]
    NegativeSnr(f64),
    #[error("numerical integration did not converge: {0}")]
    Integration(String),
    #[error("target rate {target} unreachable within [{lo}, {hi}] dB")]
    Unreachable { target: f64, lo: f64, hi: f64 },
    #[error("sequence does not match the matcher composition")]
    CompositionMismatch,
    #[error("sequence rank lies outside the matcher image")]
    RankOutOfImage,
    #[error("infeasible code parameters: {0}")]
    CodeParams(String),
    #[error("parity-check matrix not full rank after {0} attempts")]
    RankDeficient(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("malformed soft input: {0}")]
    SoftInput(String),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("field order 2^{p} incompatible with {m}-bit constellation for {mode}")]
    Incompatible { p: u32, m: u32, mode: &'static str },
    #[error("invalid PAS configuration: {0}")]
    PasConfig(String),
    #[error("density evolution bracket [{lo}, {hi}] dB does not straddle the threshold")]
    Bracket { lo: f64, hi: f64 },
    #[error("code file parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
