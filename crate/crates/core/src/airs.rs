//! Achievable information rates over the real AWGN channel: capacity, the
//! symbol-metric rate `I(X;Y)` and the bit-metric rate
//! `[H(B) - Σ H(B_i|Y)]⁺`, plus inversion for the SNR needed to reach a rate.
//!
//! Expectations over `Y | X = x` are evaluated with Gauss–Hermite quadrature
//! (128 nodes) per conditional Gaussian. An adaptive Simpson integrator on
//! `[x - 12σ, x + 12σ]` is available to cross-check.

use crate::error::{Error, Result};
use crate::mapping::{mb_fit, Constellation, ShapedDistribution};
use gauss_quad::GaussHermite;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

/// Decoding metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Smd,
    Bmd,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Smd => "smd",
            MetricKind::Bmd => "bmd",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "smd" => Ok(MetricKind::Smd),
            "bmd" => Ok(MetricKind::Bmd),
            other => Err(Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

/// One evaluated rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub snr_db: f64,
    pub rate: f64,
    pub metric: MetricKind,
    /// Amplitude entropy of the input distribution.
    pub entropy_amp: f64,
    pub nu: f64,
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// `½·log₂(1 + snr)` for a linear SNR.
pub fn capacity(snr: f64) -> Result<f64> {
    if snr < 0.0 || snr.is_nan() {
        return Err(Error::NegativeSnr(snr));
    }
    Ok(0.5 * (1.0 + snr).log2())
}

/// Quadrature scheme for expectations over the channel output.
#[derive(Clone, Copy, Debug)]
pub enum Integrator {
    /// Gauss–Hermite with the given number of nodes.
    GaussHermite(usize),
    /// Adaptive Simpson on `[x - 12σ, x + 12σ]` with an absolute tolerance.
    Simpson { tol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::GaussHermite(128)
    }
}

fn gh128() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gh_rule(128))
}

fn gh_rule(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussHermite::new(NonZeroUsize::new(n).expect("non-zero node count"));
    let norm = std::f64::consts::PI.sqrt();
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (x, w / norm))
        .collect()
}

/// Per-sample channel evaluation: log-likelihood terms of every point.
struct Posterior<'a> {
    points: Vec<f64>,
    log_prior: Vec<f64>,
    inv_two_var: f64,
    c: &'a Constellation,
    lw: Vec<f64>,
}

impl<'a> Posterior<'a> {
    fn new(c: &'a Constellation, dist: &ShapedDistribution, sigma: f64) -> Self {
        Posterior {
            points: dist.scaled_points(c),
            log_prior: dist
                .p_x
                .iter()
                .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
                .collect(),
            inv_two_var: 1.0 / (2.0 * sigma * sigma),
            c,
            lw: vec![0.0; c.size()],
        }
    }

    /// Returns `-log₂ P(X = x_k | y)` and `-log₂ P(B_j = b_j(x_k) | y)` for
    /// every level `j`, written to `bits`.
    fn neg_log_posteriors(&mut self, y: f64, k: usize, bits: &mut [f64]) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for (i, lw) in self.lw.iter_mut().enumerate() {
            let d = y - self.points[i];
            *lw = self.log_prior[i] - d * d * self.inv_two_var;
            if *lw > max {
                max = *lw;
            }
        }
        let total = log_sum_exp(self.lw.iter().copied(), max);
        let ln2 = std::f64::consts::LN_2;
        let m = self.c.bits() as usize;
        for (j, out) in bits.iter_mut().enumerate().take(m) {
            let b = self.c.label_bit(k, j);
            let same = log_sum_exp(
                self.lw
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| self.c.label_bit(*i, j) == b)
                    .map(|(_, &v)| v),
                max,
            );
            *out = (total - same) / ln2;
        }
        (total - self.lw[k]) / ln2
    }
}

#[inline]
fn log_sum_exp(values: impl Iterator<Item = f64>, max: f64) -> f64 {
    let s: f64 = values.map(|v| (v - max).exp()).sum();
    max + s.ln()
}

/// `H(X|Y)` and `H(B_j|Y)` for every bit level, in bits.
pub fn conditional_entropies(
    snr_db: f64,
    c: &Constellation,
    dist: &ShapedDistribution,
    integrator: Integrator,
) -> Result<(f64, Vec<f64>)> {
    let m = c.bits() as usize;
    let snr = db_to_linear(snr_db);
    if snr <= 0.0 || !snr.is_finite() {
        if snr == 0.0 {
            // No information: posteriors equal priors.
            let hx = dist.entropy();
            let hb = (0..m)
                .map(|j| {
                    let p1: f64 = (0..c.size())
                        .filter(|&i| c.label_bit(i, j) == 1)
                        .map(|i| dist.p_x[i])
                        .sum();
                    crate::mapping::entropy(&[p1, 1.0 - p1])
                })
                .collect();
            return Ok((hx, hb));
        }
        return Err(Error::NegativeSnr(snr));
    }
    let sigma = (1.0 / snr).sqrt();
    let mut post = Posterior::new(c, dist, sigma);
    let mut hx = 0.0;
    let mut hb = vec![0.0; m];
    let mut tmp = vec![0.0; m];
    let centers = dist.scaled_points(c);
    for k in 0..c.size() {
        let pk = dist.p_x[k];
        if pk <= 0.0 {
            continue;
        }
        let x = centers[k];
        match integrator {
            Integrator::GaussHermite(n) => {
                let owned;
                let rule: &[(f64, f64)] = if n == 128 {
                    gh128()
                } else {
                    owned = gh_rule(n);
                    &owned
                };
                let s = std::f64::consts::SQRT_2 * sigma;
                for &(t, w) in rule {
                    let y = x + s * t;
                    let h = post.neg_log_posteriors(y, k, &mut tmp);
                    hx += pk * w * h;
                    for j in 0..m {
                        hb[j] += pk * w * tmp[j];
                    }
                }
            }
            Integrator::Simpson { tol } => {
                let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
                let (a, b) = (x - 12.0 * sigma, x + 12.0 * sigma);
                for term in 0..=m {
                    let mut f = |y: f64| {
                        let d = y - x;
                        let dens = norm * (-d * d / (2.0 * sigma * sigma)).exp();
                        let h = post.neg_log_posteriors(y, k, &mut tmp);
                        dens * if term == 0 { h } else { tmp[term - 1] }
                    };
                    let v = adaptive_simpson(&mut f, a, b, tol)?;
                    if term == 0 {
                        hx += pk * v;
                    } else {
                        hb[term - 1] += pk * v;
                    }
                }
            }
        }
    }
    Ok((hx, hb))
}

fn adaptive_simpson<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64> {
    // Start from a uniform split so narrow peaks are not missed.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (flo, fhi, fmid) = (f(lo), f(hi), f(0.5 * (lo + hi)));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol / pieces as f64, 40)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Integration(format!(
            "adaptive Simpson depth exhausted on [{a}, {b}]"
        )));
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// `I(X;Y)` in bits per channel use.
pub fn rate_smd(snr_db: f64, c: &Constellation, dist: &ShapedDistribution) -> Result<f64> {
    rate_with(MetricKind::Smd, snr_db, c, dist, Integrator::default())
}

/// `[H(B) - Σ_i H(B_i|Y)]⁺` in bits per channel use.
pub fn rate_bmd(snr_db: f64, c: &Constellation, dist: &ShapedDistribution) -> Result<f64> {
    rate_with(MetricKind::Bmd, snr_db, c, dist, Integrator::default())
}

/// Either rate with an explicit integrator.
pub fn rate_with(
    metric: MetricKind,
    snr_db: f64,
    c: &Constellation,
    dist: &ShapedDistribution,
    integrator: Integrator,
) -> Result<f64> {
    if snr_db == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let (hx, hb) = conditional_entropies(snr_db, c, dist, integrator)?;
    let h = dist.entropy();
    let r = match metric {
        MetricKind::Smd => h - hx,
        MetricKind::Bmd => h - hb.iter().sum::<f64>(),
    };
    Ok(r.max(0.0))
}

/// How the input distribution is chosen while solving for the SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistPolicy {
    Uniform,
    /// Maxwell–Boltzmann with this fixed amplitude entropy.
    FixedEntropy(f64),
    /// Maxwell–Boltzmann with `ν` maximizing the rate at every SNR.
    OptimizedNu,
}

impl DistPolicy {
    /// The PAS amplitude entropy for spectral efficiency `eta` with code rate `r_c`:
    /// `R_dm = η - 1 + (1 - R_c)·m`.
    pub fn pas(eta: f64, r_c: f64, m: u32) -> DistPolicy {
        DistPolicy::FixedEntropy(eta - 1.0 + (1.0 - r_c) * m as f64)
    }
}

/// Rate at `snr_db` under a distribution policy.
pub fn rate_under_policy(
    metric: MetricKind,
    snr_db: f64,
    c: &Constellation,
    policy: DistPolicy,
) -> Result<f64> {
    match policy {
        DistPolicy::Uniform => {
            rate_with(metric, snr_db, c, &ShapedDistribution::uniform(c), Integrator::default())
        }
        DistPolicy::FixedEntropy(h) => {
            let d = mb_fit(c, h)?;
            rate_with(metric, snr_db, c, &d, Integrator::default())
        }
        DistPolicy::OptimizedNu => Ok(optimize_nu(metric, snr_db, c)?.1),
    }
}

/// Golden-section search for the rate-maximizing `ν` at one SNR.
pub fn optimize_nu(metric: MetricKind, snr_db: f64, c: &Constellation) -> Result<(f64, f64)> {
    let eval = |nu: f64| -> Result<f64> {
        let d = ShapedDistribution::maxwell_boltzmann(c, nu);
        rate_with(metric, snr_db, c, &d, Integrator::default())
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 0.5f64);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    while b - a > 1e-7 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        }
    }
    let nu = 0.5 * (a + b);
    let best = eval(nu)?.max(eval(0.0)?);
    Ok((nu, best))
}

/// Bracket used by [`required_snr`], in dB.
pub const REQUIRED_SNR_BRACKET: (f64, f64) = (-10.0, 30.0);

/// SNR in dB at which the rate reaches `target_rate`, by bisection.
pub fn required_snr(
    metric: MetricKind,
    target_rate: f64,
    c: &Constellation,
    policy: DistPolicy,
) -> Result<f64> {
    let (mut lo, mut hi) = REQUIRED_SNR_BRACKET;
    let unreachable = Error::Unreachable {
        target: target_rate,
        lo,
        hi,
    };
    if !(target_rate > 0.0) {
        return Err(unreachable);
    }
    let rate = |s: f64| rate_under_policy(metric, s, c, policy);
    if rate(hi)? < target_rate || rate(lo)? >= target_rate {
        return Err(unreachable);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? >= target_rate {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn capacity_values() {
        assert_abs_diff_eq!(capacity(1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(capacity(3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(capacity(0.0).unwrap(), 0.0);
        assert!(matches!(capacity(-1.0), Err(Error::NegativeSnr(_))));
    }

    #[test]
    fn limits() {
        let c = Constellation::ask(3).unwrap();
        let u = ShapedDistribution::uniform(&c);
        assert_eq!(rate_smd(f64::NEG_INFINITY, &c, &u).unwrap(), 0.0);
        assert!(rate_smd(-60.0, &c, &u).unwrap() < 1e-5);
        assert_abs_diff_eq!(rate_smd(60.0, &c, &u).unwrap(), 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rate_bmd(60.0, &c, &u).unwrap(), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn bpsk_bmd_equals_smd() {
        let c = Constellation::ask(1).unwrap();
        let u = ShapedDistribution::uniform(&c);
        for s in [-5.0, 0.0, 3.0, 8.0] {
            assert_abs_diff_eq!(
                rate_smd(s, &c, &u).unwrap(),
                rate_bmd(s, &c, &u).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn gauss_hermite_matches_simpson() {
        for m in [2u32, 3, 4] {
            let c = Constellation::ask(m).unwrap();
            let dists = [
                ShapedDistribution::uniform(&c),
                mb_fit(&c, (m - 1) as f64 * 0.6).unwrap(),
            ];
            for d in &dists {
                for s in [0.0, 8.0, 12.0, 19.0] {
                    for metric in [MetricKind::Smd, MetricKind::Bmd] {
                        let gh = rate_with(metric, s, &c, d, Integrator::default()).unwrap();
                        let si =
                            rate_with(metric, s, &c, d, Integrator::Simpson { tol: 1e-10 }).unwrap();
                        assert!((gh - si).abs() <= 1e-6, "m={m} s={s} {metric}: {gh} vs {si}");
                    }
                }
            }
        }
    }

    #[test]
    fn rate_ordering_and_monotone() {
        let c = Constellation::ask(3).unwrap();
        let u = ShapedDistribution::uniform(&c);
        let shaped = mb_fit(&c, 1.25).unwrap();
        let mut prev = (0.0, 0.0);
        for k in 0..=50 {
            let s = -5.0 + 0.5 * k as f64;
            let smd = rate_smd(s, &c, &u).unwrap();
            let bmd = rate_bmd(s, &c, &u).unwrap();
            let cap = capacity(db_to_linear(s)).unwrap();
            assert!(bmd <= smd + 1e-9 && smd <= cap + 1e-9, "s={s}");
            assert!(rate_smd(s, &c, &shaped).unwrap() <= cap + 1e-9);
            assert!(smd >= prev.0 - 1e-6 && bmd >= prev.1 - 1e-6);
            prev = (smd, bmd);
        }
    }

    #[test]
    fn bmd_clamped_at_zero() {
        // A heavily shaped 16-ASK at very low SNR has H(B) - ΣH(B_i|Y) < 0.
        let c = Constellation::ask(4).unwrap();
        let d = ShapedDistribution::maxwell_boltzmann(&c, 0.08);
        let (_, hb) = conditional_entropies(-15.0, &c, &d, Integrator::default()).unwrap();
        assert!(d.entropy() - hb.iter().sum::<f64>() < 0.0);
        assert_eq!(rate_bmd(-15.0, &c, &d).unwrap(), 0.0);
    }

    #[test]
    fn shaping_gain_low_mid_snr() {
        // Shaped curves above uniform ones for low to mid SNR.
        let c = Constellation::ask(3).unwrap();
        let u = ShapedDistribution::uniform(&c);
        for s in [6.0, 8.0, 10.0] {
            let (_, best_smd) = optimize_nu(MetricKind::Smd, s, &c).unwrap();
            let (_, best_bmd) = optimize_nu(MetricKind::Bmd, s, &c).unwrap();
            assert!(best_smd > rate_smd(s, &c, &u).unwrap());
            assert!(best_bmd > rate_bmd(s, &c, &u).unwrap());
        }
    }

    #[test]
    fn required_snr_unreachable() {
        let c = Constellation::ask(3).unwrap();
        assert!(matches!(
            required_snr(MetricKind::Smd, 3.5, &c, DistPolicy::Uniform),
            Err(Error::Unreachable { .. })
        ));
    }
}
