//! Channel soft information for the decoder.
//!
//! Bit-metric demapping computes per-bit LLRs and multiplies the resulting
//! bit posteriors over the binary image of every field element. Symbol-metric
//! demapping evaluates the channel likelihood of the whole constellation
//! sequence a field element stands for, which ties the field order to the
//! constellation size.

use crate::decoder::SoftInput;
use crate::error::{Error, Result};
use crate::galois::Field;
use crate::mapping::{Constellation, ShapedDistribution};
use serde::{Deserialize, Serialize};
use std::fmt;

/// LLRs are clamped to `±LLR_CLAMP`.
pub const LLR_CLAMP: f64 = 40.0;

/// `n × m` bit LLRs, `ln P(b=0|y)/P(b=1|y)`, row per channel use.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrMatrix {
    m: usize,
    data: Vec<f64>,
}

impl LlrMatrix {
    pub fn bits(&self) -> usize {
        self.m
    }

    /// Channel uses.
    pub fn len(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// LLR of bit level `level` (0-based) at channel use `i`.
    #[inline]
    pub fn get(&self, i: usize, level: usize) -> f64 {
        self.data[i * self.m + level]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Demapping mode for the compatibility rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemapMode {
    UniformSmd,
    PasSmd,
    Bmd,
}

impl fmt::Display for DemapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemapMode::UniformSmd => "uniform SMD",
            DemapMode::PasSmd => "PAS SMD",
            DemapMode::Bmd => "BMD",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub mode: DemapMode,
    /// Channel symbols (uniform SMD) or amplitudes (PAS SMD) per field symbol.
    pub ell: Option<usize>,
}

/// Whether GF(2^p) can be paired with `2^m`-ASK under `mode`.
pub fn compatibility(p: u32, m: u32, mode: DemapMode) -> Option<Compatibility> {
    let ell = match mode {
        DemapMode::Bmd => return Some(Compatibility { mode, ell: None }),
        DemapMode::UniformSmd => (m >= 1 && p % m == 0).then(|| (p / m) as usize),
        DemapMode::PasSmd => (m >= 2 && p % (m - 1) == 0).then(|| (p / (m - 1)) as usize),
    }?;
    Some(Compatibility { mode, ell: Some(ell) })
}

/// Like [`compatibility`] but reports the failure.
pub fn require_compatible(p: u32, m: u32, mode: DemapMode) -> Result<Compatibility> {
    let mode_name = match mode {
        DemapMode::UniformSmd => "uniform SMD",
        DemapMode::PasSmd => "PAS SMD",
        DemapMode::Bmd => "BMD",
    };
    compatibility(p, m, mode).ok_or(Error::Incompatible { p, m, mode: mode_name })
}

/// Per-sample log-weights `ln P_X(x) - (y - Δx)²/2σ²` for every point.
struct LogLikelihood {
    points: Vec<f64>,
    log_prior: Vec<f64>,
    inv_two_var: f64,
}

impl LogLikelihood {
    fn new(c: &Constellation, dist: &ShapedDistribution, sigma: f64) -> Self {
        LogLikelihood {
            points: dist.scaled_points(c),
            log_prior: dist
                .p_x
                .iter()
                .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
                .collect(),
            inv_two_var: 1.0 / (2.0 * sigma * sigma),
        }
    }

    #[inline]
    fn eval(&self, y: f64, out: &mut [f64]) {
        for ((o, &x), &lp) in out.iter_mut().zip(&self.points).zip(&self.log_prior) {
            let d = y - x;
            *o = lp - d * d * self.inv_two_var;
        }
    }

    /// Unnormalized log-likelihoods without prior, `-(y - Δx)²/2σ²`.
    #[inline]
    fn eval_channel(&self, y: f64, out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(&self.points) {
            let d = y - x;
            *o = -d * d * self.inv_two_var;
        }
    }
}

#[inline]
fn lse(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Bit LLRs for every sample, with the prior `P_X` from `dist`.
pub fn bit_llrs(y: &[f64], c: &Constellation, dist: &ShapedDistribution, sigma: f64) -> LlrMatrix {
    let m = c.bits() as usize;
    let ll = LogLikelihood::new(c, dist, sigma);
    let mut w = vec![0.0; c.size()];
    let mut data = Vec::with_capacity(y.len() * m);
    for &yi in y {
        ll.eval(yi, &mut w);
        for j in 0..m {
            let zero = lse((0..c.size()).filter(|&i| c.label_bit(i, j) == 0).map(|i| w[i]));
            let one = lse((0..c.size()).filter(|&i| c.label_bit(i, j) == 1).map(|i| w[i]));
            let l = match (zero.is_finite(), one.is_finite()) {
                (true, true) => zero - one,
                (true, false) => LLR_CLAMP,
                (false, true) => -LLR_CLAMP,
                (false, false) => 0.0,
            };
            data.push(l.clamp(-LLR_CLAMP, LLR_CLAMP));
        }
    }
    LlrMatrix { m, data }
}

/// `P(b = 0) = e^l / (1 + e^l)`, stable for either sign.
#[inline]
pub fn prob_zero(l: f64) -> f64 {
    let l = l.clamp(-LLR_CLAMP, LLR_CLAMP);
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Writes the normalized product of bit posteriors over the binary image of
/// every element into `out` (length `2^llrs.len()`). Bits are taken most
/// significant first, matching [`Field::beta`].
pub fn bmd_symbol(llrs: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), 1 << llrs.len());
    out[0] = 1.0;
    let mut len = 1;
    for &l in llrs {
        let (p0, p1) = (prob_zero(l), prob_zero(-l));
        // Value doubles with each bit: c' = 2c + b.
        for c in (0..len).rev() {
            let v = out[c];
            out[2 * c] = v * p0;
            out[2 * c + 1] = v * p1;
        }
        len *= 2;
    }
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
}

/// Groups LLRs (already in codeword bit order) into `p`-bit symbols.
pub fn bmd_combine(llrs: &[f64], field: &Field) -> Result<SoftInput> {
    let p = field.bits() as usize;
    let q = field.order();
    if llrs.len() % p != 0 {
        return Err(Error::Length {
            expected: llrs.len().div_ceil(p) * p,
            got: llrs.len(),
        });
    }
    let n = llrs.len() / p;
    let mut data = vec![0.0; n * q];
    for (chunk, out) in llrs.chunks(p).zip(data.chunks_mut(q)) {
        bmd_symbol(chunk, out);
    }
    SoftInput::new_unchecked(q, data)
}

fn normalize_logs(logs: &[f64], out: &mut [f64]) {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (o, &l) in out.iter_mut().zip(logs) {
        *o = (l - max).exp();
        s += *o;
    }
    out.iter_mut().for_each(|x| *x /= s);
}

/// Symbol-metric soft information for uniform signaling: `ℓ = p/m`
/// consecutive channel uses form one field symbol. The `j`-th group of `m`
/// bits of the element (most significant first) is the label of point `j`.
pub fn smd_uniform(
    y_block: &[f64],
    c: &Constellation,
    field: &Field,
    sigma: f64,
) -> Result<Vec<f64>> {
    let comp = require_compatible(field.bits(), c.bits(), DemapMode::UniformSmd)?;
    let ell = comp.ell.unwrap_or(0);
    if y_block.len() != ell {
        return Err(Error::Length {
            expected: ell,
            got: y_block.len(),
        });
    }
    let mut out = vec![0.0; field.order()];
    smd_uniform_into(y_block, c, field, sigma, &mut out);
    Ok(out)
}

pub(crate) fn smd_uniform_into(
    y_block: &[f64],
    c: &Constellation,
    field: &Field,
    sigma: f64,
    out: &mut [f64],
) {
    let m = c.bits() as usize;
    let ll = LogLikelihood::new(c, &ShapedDistribution::uniform(c), sigma);
    let mut w = vec![0.0; c.size()];
    // Per-position channel log-likelihood indexed by label.
    let per_label: Vec<Vec<f64>> = y_block
        .iter()
        .map(|&y| {
            ll.eval_channel(y, &mut w);
            (0..c.size() as u16).map(|l| w[c.point_of_label(l)]).collect()
        })
        .collect();
    let ell = y_block.len();
    let mask = (1usize << m) - 1;
    let logs: Vec<f64> = (0..field.order())
        .map(|v| {
            (0..ell)
                .map(|j| per_label[j][(v >> ((ell - 1 - j) * m)) & mask])
                .sum()
        })
        .collect();
    normalize_logs(&logs, out);
}

/// Which part of a PAS codeword a symbol-metric symbol carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PasSymbolKind {
    /// `ℓ = p/(m-1)` amplitude labels.
    Amplitude,
    /// `p` sign bits for `p` channel uses.
    Sign,
}

/// Symbol-metric soft information for PAS.
///
/// Amplitude symbols: `P(c) ∝ Π_j P_A(a_j) Σ_s ½ p(y_j | s·a_j)`.
/// Sign symbols: `P(c) ∝ Π_j Σ_a P_A(a) p(y_j | s_j·a)`, with bit 0 a negative sign.
pub fn smd_pas(
    y_segment: &[f64],
    kind: PasSymbolKind,
    c: &Constellation,
    dist: &ShapedDistribution,
    sigma: f64,
    field: &Field,
) -> Result<Vec<f64>> {
    let comp = require_compatible(field.bits(), c.bits(), DemapMode::PasSmd)?;
    let expected = match kind {
        PasSymbolKind::Amplitude => comp.ell.unwrap_or(0),
        PasSymbolKind::Sign => field.bits() as usize,
    };
    if y_segment.len() != expected {
        return Err(Error::Length {
            expected,
            got: y_segment.len(),
        });
    }
    let mut out = vec![0.0; field.order()];
    smd_pas_into(y_segment, kind, c, dist, sigma, &mut out);
    Ok(out)
}

pub(crate) fn smd_pas_into(
    y_segment: &[f64],
    kind: PasSymbolKind,
    c: &Constellation,
    dist: &ShapedDistribution,
    sigma: f64,
    out: &mut [f64],
) {
    let ll = LogLikelihood::new(c, dist, sigma);
    let mut w = vec![0.0; c.size()];
    let na = c.num_amplitudes();
    let q = out.len();
    match kind {
        PasSymbolKind::Amplitude => {
            let bits = (c.bits() - 1) as usize;
            let mask = (1usize << bits) - 1;
            // Per position: log of P_A(a)·Σ_s ½ p(y|s·a) indexed by amplitude label.
            let per_label: Vec<Vec<f64>> = y_segment
                .iter()
                .map(|&y| {
                    ll.eval_channel(y, &mut w);
                    (0..na as u16)
                        .map(|l| {
                            let a = c.amplitude_of_label(l);
                            let pa = dist.p_amp[a];
                            let both = lse(
                                [w[c.point_of(a, true)], w[c.point_of(a, false)]].into_iter(),
                            );
                            if pa > 0.0 {
                                pa.ln() + both
                            } else {
                                f64::NEG_INFINITY
                            }
                        })
                        .collect()
                })
                .collect();
            let ell = y_segment.len();
            let logs: Vec<f64> = (0..q)
                .map(|v| {
                    (0..ell)
                        .map(|j| per_label[j][(v >> ((ell - 1 - j) * bits)) & mask])
                        .sum()
                })
                .collect();
            normalize_logs(&logs, out);
        }
        PasSymbolKind::Sign => {
            // Factorizes over bits: one marginal per channel use.
            let llrs: Vec<f64> = y_segment
                .iter()
                .map(|&y| {
                    ll.eval(y, &mut w);
                    let neg = lse((0..na).map(|a| w[c.point_of(a, false)]));
                    let pos = lse((0..na).map(|a| w[c.point_of(a, true)]));
                    (neg - pos).clamp(-LLR_CLAMP, LLR_CLAMP)
                })
                .collect();
            bmd_symbol(&llrs, out);
        }
    }
}
