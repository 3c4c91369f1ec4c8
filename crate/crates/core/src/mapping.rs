//! ASK constellations with binary reflected Gray labels and Maxwell–Boltzmann
//! shaping.
//!
//! Points are kept on the integer grid `{±1, ±3, …, ±(M-1)}`; the power
//! normalizing factor lives in [`ShapedDistribution::scale`]. Labels are
//! `m`-bit integers whose most significant bit is bit-level 1 (the sign
//! bit), so `label >> (m - 1)` is `b₁` and `label & ((1 << (m-1)) - 1)` is the
//! amplitude label `χ_A(|x|)`.

use crate::error::{Error, Result};

/// Binary reflected Gray code over `2^m` positions.
pub fn brgc(m: u32) -> Result<Vec<u16>> {
    if !(1..=8).contains(&m) {
        return Err(Error::ConstellationBits(m));
    }
    // Reflect-and-prefix.
    let mut codes: Vec<u16> = vec![0, 1];
    for level in 1..m {
        let prefix = 1u16 << level;
        let mirrored: Vec<u16> = codes.iter().rev().map(|&c| c | prefix).collect();
        codes.extend(mirrored);
    }
    Ok(codes)
}

/// Hamming distance between two labels.
#[inline]
pub fn hamming(a: u16, b: u16) -> u32 {
    (a ^ b).count_ones()
}

/// Real `2^m`-ASK with BRGC labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    m: u32,
    points: Vec<f64>,
    labels: Vec<u16>,
    /// Point index for every label.
    by_label: Vec<usize>,
}

impl Constellation {
    /// Builds `2^m`-ASK. The half-plane separating bit of the BRGC is
    /// checked to be the top bit so that `χ(x) = (b₁, χ_A(|x|))` holds.
    pub fn ask(m: u32) -> Result<Constellation> {
        let labels = brgc(m)?;
        let size = 1usize << m;
        let points: Vec<f64> = (0..size)
            .map(|i| (2 * i as i64 - (size as i64 - 1)) as f64)
            .collect();
        let sign = 1u16 << (m - 1);
        for (i, &l) in labels.iter().enumerate() {
            let positive = points[i] > 0.0;
            assert_eq!(l & sign != 0, positive, "BRGC top bit must separate the halves");
        }
        let mut by_label = vec![0usize; size];
        for (i, &l) in labels.iter().enumerate() {
            by_label[l as usize] = i;
        }
        Ok(Constellation {
            m,
            points,
            labels,
            by_label,
        })
    }

    /// Bits per symbol.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Number of points `M`.
    #[inline]
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Unscaled levels in ascending order.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, point: usize) -> u16 {
        self.labels[point]
    }

    /// Point index carrying `label`.
    #[inline]
    pub fn point_of_label(&self, label: u16) -> usize {
        self.by_label[label as usize]
    }

    /// Bit `level` (0-based; 0 is the sign bit) of the label of `point`.
    #[inline]
    pub fn label_bit(&self, point: usize, level: usize) -> u8 {
        ((self.labels[point] >> (self.m as usize - 1 - level)) & 1) as u8
    }

    /// Amplitudes `{1, 3, …, M-1}`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.points[self.size() / 2..].to_vec()
    }

    /// Number of amplitudes `M/2`.
    #[inline]
    pub fn num_amplitudes(&self) -> usize {
        self.size() / 2
    }

    /// Amplitude index (0 for `|x| = 1`) of a point index.
    #[inline]
    pub fn amplitude_of_point(&self, point: usize) -> usize {
        let half = self.size() / 2;
        if point >= half {
            point - half
        } else {
            half - 1 - point
        }
    }

    /// Point index from an amplitude index and a sign (`true` for positive).
    #[inline]
    pub fn point_of(&self, amplitude: usize, positive: bool) -> usize {
        let half = self.size() / 2;
        if positive {
            half + amplitude
        } else {
            half - 1 - amplitude
        }
    }

    /// `χ_A`: the `(m-1)`-bit label of an amplitude index.
    #[inline]
    pub fn amplitude_label(&self, amplitude: usize) -> u16 {
        let mask = (1u16 << (self.m - 1)) - 1;
        self.labels[self.point_of(amplitude, true)] & mask
    }

    /// Inverse of `χ_A`.
    #[inline]
    pub fn amplitude_of_label(&self, amp_label: u16) -> usize {
        let sign = 1u16 << (self.m - 1);
        self.amplitude_of_point(self.point_of_label(amp_label | sign))
    }
}

/// Entropy in bits of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// `Δ = 1/sqrt(Σ P_X(x)·x²)` over unscaled points.
pub fn scale_for(c: &Constellation, p_x: &[f64]) -> Result<f64> {
    if p_x.len() != c.size() {
        return Err(Error::Distribution(format!(
            "{} probabilities for {} points",
            p_x.len(),
            c.size()
        )));
    }
    if p_x.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Distribution("negative or non-finite probability".into()));
    }
    let total: f64 = p_x.iter().sum();
    if total <= 0.0 {
        return Err(Error::Distribution("all-zero distribution".into()));
    }
    let power: f64 = p_x
        .iter()
        .zip(c.points())
        .map(|(&p, &x)| p * x * x)
        .sum::<f64>()
        / total;
    Ok(1.0 / power.sqrt())
}

/// A symmetric input distribution `P_X(x) = P_A(|x|)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapedDistribution {
    /// Maxwell–Boltzmann parameter on the unscaled grid (0 for uniform).
    pub nu: f64,
    /// Probability per amplitude index.
    pub p_amp: Vec<f64>,
    /// Probability per point index.
    pub p_x: Vec<f64>,
    /// `H(A)` in bits.
    pub entropy_amp: f64,
    /// Power normalization `Δ`.
    pub scale: f64,
}

impl ShapedDistribution {
    pub fn uniform(c: &Constellation) -> ShapedDistribution {
        Self::maxwell_boltzmann(c, 0.0)
    }

    /// `P_X(x) ∝ exp(-ν x²)` on the unscaled levels.
    pub fn maxwell_boltzmann(c: &Constellation, nu: f64) -> ShapedDistribution {
        let amps = c.amplitudes();
        // Shift the exponent by the smallest amplitude to avoid underflow on large ν.
        let a0 = amps[0] * amps[0];
        let w: Vec<f64> = amps.iter().map(|a| (-nu * (a * a - a0)).exp()).collect();
        let total: f64 = w.iter().sum();
        let p_amp: Vec<f64> = w.iter().map(|x| x / total).collect();
        Self::from_amplitudes(c, nu, p_amp)
    }

    /// Builds the symmetric distribution from an amplitude distribution.
    pub fn from_amplitudes(c: &Constellation, nu: f64, p_amp: Vec<f64>) -> ShapedDistribution {
        let p_x: Vec<f64> = (0..c.size())
            .map(|i| p_amp[c.amplitude_of_point(i)] / 2.0)
            .collect();
        let scale = scale_for(c, &p_x).expect("amplitude distribution is non-degenerate");
        ShapedDistribution {
            nu,
            entropy_amp: entropy(&p_amp),
            p_amp,
            p_x,
            scale,
        }
    }

    /// `H(X) = H(A) + 1`.
    pub fn entropy(&self) -> f64 {
        entropy(&self.p_x)
    }

    /// Scaled constellation points `Δ·x`.
    pub fn scaled_points(&self, c: &Constellation) -> Vec<f64> {
        c.points().iter().map(|x| x * self.scale).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.nu == 0.0
    }
}

/// Tolerance on `H(A)` reached by [`mb_fit`].
pub const MB_FIT_TOL: f64 = 1e-6;

/// Fits `ν ≥ 0` so that the Maxwell–Boltzmann amplitude entropy equals
/// `target_entropy`, by bisection on the strictly decreasing map `ν ↦ H(A)`.
pub fn mb_fit(c: &Constellation, target_entropy: f64) -> Result<ShapedDistribution> {
    let max = (c.bits() - 1) as f64;
    if !(target_entropy > 0.0 && target_entropy <= max) {
        return Err(Error::EntropyTarget {
            target: target_entropy,
            max,
        });
    }
    let h = |nu: f64| ShapedDistribution::maxwell_boltzmann(c, nu).entropy_amp;
    if (h(0.0) - target_entropy).abs() <= MB_FIT_TOL {
        return Ok(ShapedDistribution::uniform(c));
    }
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    while h(hi) > target_entropy {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::EntropyTarget {
                target: target_entropy,
                max,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > target_entropy {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let nu = 0.5 * (lo + hi);
    let d = ShapedDistribution::maxwell_boltzmann(c, nu);
    debug_assert!((d.entropy_amp - target_entropy).abs() <= MB_FIT_TOL);
    Ok(d)
}
