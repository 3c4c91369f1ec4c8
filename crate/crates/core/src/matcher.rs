//! Constant-composition distribution matcher.
//!
//! `k` input bits are read as an integer rank and unranked into the
//! lexicographically ordered list of length-`n` sequences with a fixed
//! composition (symbol `0 < 1 < …`). With `k = ⌊log₂ multinomial⌋` only the
//! first `2^k` sequences are reachable; anything else decodes to an error.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `n! / Π c_i!` computed exactly.
pub fn multinomial(counts: &[usize]) -> BigUint {
    // Product of binomials keeps intermediates small and exact.
    let mut total = 0usize;
    let mut acc = BigUint::one();
    for &c in counts {
        for j in 1..=c {
            total += 1;
            acc *= total;
            acc /= j;
        }
    }
    acc
}

/// A fixed composition over symbols `0..counts.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    counts: Vec<usize>,
    n: usize,
    k: usize,
    size: BigUint,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Composition> {
        let n: usize = counts.iter().sum();
        if n == 0 {
            return Err(Error::Config("empty composition".into()));
        }
        let size = multinomial(&counts);
        let k = (size.bits() - 1) as usize;
        Ok(Composition { counts, n, k, size })
    }

    /// Largest-remainder rounding of `n·p` to integer counts summing to `n`.
    pub fn for_distribution(p: &[f64], n: usize) -> Result<Composition> {
        if n == 0 || p.is_empty() {
            return Err(Error::Config("composition needs n ≥ 1 and a non-empty alphabet".into()));
        }
        let total: f64 = p.iter().sum();
        let scaled: Vec<f64> = p.iter().map(|x| x / total * n as f64).collect();
        let mut counts: Vec<usize> = scaled.iter().map(|x| x.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..p.len()).collect();
        // Largest remainder first; ties go to the larger probability, then the lower index.
        order.sort_by(|&a, &b| {
            let (ra, rb) = (scaled[a] - scaled[a].floor(), scaled[b] - scaled[b].floor());
            rb.partial_cmp(&ra)
                .unwrap()
                .then(p[b].partial_cmp(&p[a]).unwrap())
                .then(a.cmp(&b))
        });
        for &i in order.iter().take(n - assigned) {
            counts[i] += 1;
        }
        Composition::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Output length `n`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Input bits `k`.
    pub fn input_bits(&self) -> usize {
        self.k
    }

    /// `k / n`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Number of sequences with this composition.
    pub fn num_sequences(&self) -> &BigUint {
        &self.size
    }

    /// Entropy of the empirical distribution `counts/n`.
    pub fn empirical_entropy(&self) -> f64 {
        let p: Vec<f64> = self.counts.iter().map(|&c| c as f64 / self.n as f64).collect();
        crate::mapping::entropy(&p)
    }

    /// Sequence at lexicographic position `rank`.
    pub fn unrank(&self, rank: &BigUint) -> Result<Vec<u8>> {
        if rank >= &self.size {
            return Err(Error::RankOutOfImage);
        }
        let mut rank = rank.clone();
        let mut remaining = self.counts.clone();
        let mut left = self.n;
        let mut block = self.size.clone();
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            for s in 0..remaining.len() {
                if remaining[s] == 0 {
                    continue;
                }
                // Sequences that start with s from here on.
                let sub = &block * remaining[s] / left;
                if rank < sub {
                    out.push(s as u8);
                    remaining[s] -= 1;
                    block = sub;
                    break;
                }
                rank -= &sub;
            }
            left -= 1;
        }
        Ok(out)
    }

    /// Lexicographic position of `seq`.
    pub fn rank(&self, seq: &[u8]) -> Result<BigUint> {
        if seq.len() != self.n {
            return Err(Error::CompositionMismatch);
        }
        let mut hist = vec![0usize; self.counts.len()];
        for &s in seq {
            let s = s as usize;
            if s >= hist.len() {
                return Err(Error::CompositionMismatch);
            }
            hist[s] += 1;
        }
        if hist != self.counts {
            return Err(Error::CompositionMismatch);
        }
        let mut rank = BigUint::zero();
        let mut remaining = self.counts.clone();
        let mut left = self.n;
        let mut block = self.size.clone();
        for &sym in seq {
            let sym = sym as usize;
            for s in 0..sym {
                if remaining[s] > 0 {
                    rank += &block * remaining[s] / left;
                }
            }
            block = &block * remaining[sym] / left;
            remaining[sym] -= 1;
            left -= 1;
        }
        Ok(rank)
    }

    /// Maps exactly `k` bits (most significant first) to a sequence.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.k {
            return Err(Error::BitLength {
                expected: self.k,
                got: bits.len(),
            });
        }
        let mut rank = BigUint::zero();
        for chunk in bits.chunks(32) {
            let v = chunk.iter().fold(0u64, |a, &b| (a << 1) | u64::from(b & 1));
            rank <<= chunk.len();
            rank += v;
        }
        self.unrank(&rank)
    }

    /// Inverse of [`Composition::encode`]; sequences outside its image are errors.
    pub fn decode(&self, seq: &[u8]) -> Result<Vec<u8>> {
        let rank = self.rank(seq)?;
        if rank.bits() as usize > self.k {
            return Err(Error::RankOutOfImage);
        }
        let mut out = vec![0u8; self.k];
        for (i, o) in out.iter_mut().enumerate() {
            let bit = self.k - 1 - i;
            *o = rank.bit(bit as u64) as u8;
        }
        Ok(out)
    }
}

/// The index's integer value when it fits in a `u64`, for tests and display.
pub fn rank_u64(rank: &BigUint) -> Option<u64> {
    rank.to_u64()
}
