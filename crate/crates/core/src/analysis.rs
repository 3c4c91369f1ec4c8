//! AWGN channel, Monte Carlo density evolution and FER simulation.

use crate::airs::{db_to_linear, required_snr, DistPolicy, MetricKind};
use crate::decoder::{normalize, wht_in_place, Decoder};
use crate::error::{Error, Result};
use crate::galois::Field;
use crate::mapping::{mb_fit, Constellation};
use crate::pas::{CodedModulation, Framing, PasFraming, UniformFraming};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use std::sync::Arc;

/// Independent generator keyed by a master seed and three stream indices.
pub fn stream_rng(seed: u64, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (i, w) in [seed, a, b, c].iter().enumerate() {
        key[8 * i..8 * i + 8].copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Real AWGN channel at unit signal power.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwgnChannel {
    sigma: f64,
}

impl AwgnChannel {
    pub fn new(sigma: f64) -> Result<AwgnChannel> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("noise standard deviation {sigma} must be positive")));
        }
        Ok(AwgnChannel { sigma })
    }

    pub fn from_snr_db(snr_db: f64) -> AwgnChannel {
        AwgnChannel {
            sigma: (1.0 / db_to_linear(snr_db)).sqrt(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn snr(&self) -> f64 {
        1.0 / (self.sigma * self.sigma)
    }

    pub fn snr_db(&self) -> f64 {
        -20.0 * self.sigma.log10()
    }

    pub fn transmit<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Vec<f64> {
        x.iter()
            .map(|&xi| xi + self.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

/// Input statistics of a DE ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Shaping {
    Uniform,
    /// PAS with a Maxwell–Boltzmann amplitude distribution of this entropy.
    Pas { matcher_rate: f64 },
}

/// A `(2, d_c)`-regular ensemble over a field, a constellation and a metric.
#[derive(Clone, Debug)]
pub struct DeEnsemble {
    pub field: Arc<Field>,
    pub check_degree: usize,
    pub constellation: Constellation,
    pub shaping: Shaping,
    pub metric: MetricKind,
}

impl DeEnsemble {
    pub fn code_rate(&self) -> f64 {
        1.0 - 2.0 / self.check_degree as f64
    }

    /// Transmission rate in bits per channel use.
    pub fn eta(&self) -> f64 {
        let m = self.constellation.bits() as f64;
        match self.shaping {
            Shaping::Uniform => self.code_rate() * m,
            Shaping::Pas { matcher_rate } => matcher_rate + 1.0 - (1.0 - self.code_rate()) * m,
        }
    }

    fn policy(&self) -> DistPolicy {
        match self.shaping {
            Shaping::Uniform => DistPolicy::Uniform,
            Shaping::Pas { matcher_rate } => DistPolicy::FixedEntropy(matcher_rate),
        }
    }

    /// SNR at which the rate of the ensemble's metric equals `η`.
    pub fn rate_limit_db(&self) -> Result<f64> {
        required_snr(self.metric, self.eta(), &self.constellation, self.policy())
    }

    fn framing(&self) -> Result<DeFraming> {
        if self.check_degree < 3 {
            return Err(Error::CodeParams(format!("check degree {} < 3", self.check_degree)));
        }
        let dc = self.check_degree;
        match self.shaping {
            Shaping::Uniform => {
                let f = (1..=4096)
                    .find_map(|n_c| {
                        UniformFraming::new(self.constellation.clone(), self.field.clone(), n_c).ok()
                    })
                    .ok_or_else(|| Error::Config("no uniform frame length fits".into()))?;
                check_metric(&f, self.metric)?;
                Ok(DeFraming::Uniform(f))
            }
            Shaping::Pas { matcher_rate } => {
                let dist = mb_fit(&self.constellation, matcher_rate)?;
                let mut last = Error::PasConfig("no PAS frame length fits".into());
                for n_c in (1..=4096).filter(|n| (2 * n) % dc == 0) {
                    let k_c = n_c - 2 * n_c / dc;
                    match PasFraming::new(
                        self.constellation.clone(),
                        self.field.clone(),
                        dist.clone(),
                        n_c,
                        k_c,
                    ) {
                        Ok(f) => {
                            if self.metric == MetricKind::Smd {
                                if let Err(e) = f.smd_supported() {
                                    // Incompatible field/constellation pairs never fit.
                                    if matches!(e, Error::Incompatible { .. }) {
                                        return Err(e);
                                    }
                                    last = e;
                                    continue;
                                }
                            }
                            return Ok(DeFraming::Pas(f));
                        }
                        Err(e) => last = e,
                    }
                }
                Err(last)
            }
        }
    }
}

fn check_metric(f: &UniformFraming, metric: MetricKind) -> Result<()> {
    if metric == MetricKind::Smd {
        crate::demap::require_compatible(
            f.field().bits(),
            f.constellation().bits(),
            crate::demap::DemapMode::UniformSmd,
        )?;
    }
    Ok(())
}

enum DeFraming {
    Uniform(UniformFraming),
    Pas(PasFraming),
}

impl DeFraming {
    fn symbols(&self) -> usize {
        match self {
            DeFraming::Uniform(f) => f.symbols(),
            DeFraming::Pas(f) => f.symbols(),
        }
    }

    /// Writes `out.len() / q` true-symbol-centered channel vectors.
    fn fill(&self, out: &mut [f64], q: usize, sigma: f64, metric: MetricKind, rng: &mut ChaCha8Rng) -> Result<()> {
        let ch = AwgnChannel { sigma };
        let per_frame = self.symbols() * q;
        for block in out.chunks_mut(per_frame) {
            let (x, truth) = match self {
                DeFraming::Uniform(f) => f.sample_uncoded(rng),
                DeFraming::Pas(f) => f.sample_uncoded(rng),
            };
            let y = ch.transmit(&x, rng);
            let soft = match self {
                DeFraming::Uniform(f) => f.soft_frame(&y, sigma, metric)?,
                DeFraming::Pas(f) => f.soft_frame(&y, sigma, metric)?,
            };
            for (i, row) in block.chunks_mut(q).enumerate() {
                let src = soft.row(i);
                let t = truth[i].index();
                for (a, o) in row.iter_mut().enumerate() {
                    *o = src[a ^ t];
                }
            }
        }
        Ok(())
    }
}

/// Density-evolution settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeConfig {
    /// Message samples per edge direction.
    pub population: usize,
    pub max_iter: usize,
    /// Symbol-error probability that counts as convergence.
    pub target_error: f64,
    /// Bisection stops once the bracket is this narrow (dB).
    pub precision: f64,
    /// Search range in dB; defaults to `±half_width` around the rate limit.
    pub bracket: Option<(f64, f64)>,
    pub half_width: f64,
    /// Iterations without a 2 % improvement after which a run is declared stuck.
    pub stall_iters: usize,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            population: 20_000,
            max_iter: 200,
            target_error: 1e-5,
            precision: 0.02,
            bracket: None,
            half_width: 2.0,
            stall_iters: 30,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 1000 {
            return Err(Error::Config(format!("population {} < 1000", self.population)));
        }
        if self.precision < 0.01 {
            return Err(Error::Config(format!("precision {} dB < 0.01 dB", self.precision)));
        }
        if self.max_iter == 0 || self.stall_iters == 0 {
            return Err(Error::Config("iteration limits must be positive".into()));
        }
        if !(self.target_error > 0.0 && self.target_error < 1.0) {
            return Err(Error::Config(format!("target error {} outside (0, 1)", self.target_error)));
        }
        if let Some((lo, hi)) = self.bracket {
            if !(lo < hi) {
                return Err(Error::Bracket { lo, hi });
            }
        }
        Ok(())
    }
}

/// Result of tracking the ensemble at one SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeRun {
    pub snr_db: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Symbol-error probability at the last iteration.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeThreshold {
    pub snr_db: f64,
    /// Final bracket: `lo` fails, `hi` converges.
    pub lo: f64,
    pub hi: f64,
    pub runs: Vec<DeRun>,
}

/// Samples handled by one task; a multiple of the channel frame length.
fn chunk_len(frame: usize) -> usize {
    frame * 256usize.div_ceil(frame)
}

/// Tracks message populations at one SNR.
pub fn de_run(ens: &DeEnsemble, snr_db: f64, cfg: &DeConfig, seed: u64) -> Result<DeRun> {
    cfg.validate()?;
    let framing = ens.framing()?;
    de_run_with(ens, &framing, snr_db, cfg, seed)
}

fn de_run_with(ens: &DeEnsemble, framing: &DeFraming, snr_db: f64, cfg: &DeConfig, seed: u64) -> Result<DeRun> {
    let field = &ens.field;
    let q = field.order();
    let dc = ens.check_degree;
    let sigma = AwgnChannel::from_snr_db(snr_db).sigma();
    let chunk = chunk_len(framing.symbols());
    let n = cfg.population.div_ceil(chunk) * chunk;
    let key = snr_db.to_bits();
    let tables: Vec<Vec<u16>> = field.elements().map(|h| field.mul_table(h)).collect();

    let mut chan = vec![0.0; n * q];
    let mut c2v = vec![1.0 / q as f64; n * q];
    let mut v2c_hat = vec![0.0; n * q];
    let mut best = f64::INFINITY;
    let mut last_gain = 0usize;
    let mut error = 1.0;

    for it in 1..=cfg.max_iter {
        let it64 = it as u64;
        chan.par_chunks_mut(chunk * q)
            .enumerate()
            .try_for_each(|(j, out)| {
                let mut rng = stream_rng(seed, key, it64, (j as u64) << 2);
                framing.fill(out, q, sigma, ens.metric, &mut rng)
            })?;

        // Variable nodes: channel times one check message, then into the w-domain.
        {
            let c2v = &c2v;
            let chan = &chan;
            v2c_hat
                .par_chunks_mut(chunk * q)
                .enumerate()
                .for_each(|(j, out)| {
                    let mut rng = stream_rng(seed, key, it64, ((j as u64) << 2) | 1);
                    let mut tmp = vec![0.0; q];
                    for (k, row) in out.chunks_mut(q).enumerate() {
                        let i = j * chunk + k;
                        let other = rng.gen_range(0..n);
                        let ch = &chan[i * q..(i + 1) * q];
                        let cm = &c2v[other * q..(other + 1) * q];
                        for a in 0..q {
                            tmp[a] = ch[a] * cm[a];
                        }
                        normalize(&mut tmp);
                        let h = &tables[rng.gen_range(1..q)];
                        for a in 0..q {
                            row[h[a] as usize] = tmp[a];
                        }
                        wht_in_place(row);
                    }
                });
        }

        // Check nodes: product of d_c - 1 transformed inputs, back to the symbol domain.
        {
            let v2c_hat = &v2c_hat;
            c2v.par_chunks_mut(chunk * q).enumerate().for_each(|(j, out)| {
                let mut rng = stream_rng(seed, key, it64, ((j as u64) << 2) | 2);
                let mut prod = vec![0.0; q];
                let inv_q = 1.0 / q as f64;
                for row in out.chunks_mut(q) {
                    prod.iter_mut().for_each(|x| *x = 1.0);
                    for _ in 0..dc - 1 {
                        let o = rng.gen_range(0..n);
                        for (p, &x) in prod.iter_mut().zip(&v2c_hat[o * q..(o + 1) * q]) {
                            *p *= x;
                        }
                    }
                    wht_in_place(&mut prod);
                    prod.iter_mut().for_each(|x| *x *= inv_q);
                    normalize(&mut prod);
                    let h = &tables[rng.gen_range(1..q)];
                    for a in 0..q {
                        row[a] = prod[h[a] as usize];
                    }
                }
            });
        }

        // Posterior error with two independent check messages.
        let partial: Vec<f64> = {
            let c2v = &c2v;
            chan.par_chunks(chunk * q)
                .enumerate()
                .map(|(j, block)| {
                    let mut rng = stream_rng(seed, key, it64, ((j as u64) << 2) | 3);
                    let mut s = 0.0;
                    for ch in block.chunks(q) {
                        let (r1, r2) = (rng.gen_range(0..n), rng.gen_range(0..n));
                        let m1 = &c2v[r1 * q..(r1 + 1) * q];
                        let m2 = &c2v[r2 * q..(r2 + 1) * q];
                        let mut total = 0.0;
                        let mut zero = 0.0;
                        for a in 0..q {
                            let v = ch[a] * m1[a] * m2[a];
                            total += v;
                            if a == 0 {
                                zero = v;
                            }
                        }
                        s += if total > 0.0 { 1.0 - zero / total } else { 1.0 };
                    }
                    s
                })
                .collect()
        };
        error = partial.iter().sum::<f64>() / n as f64;
        if !error.is_finite() {
            return Err(Error::Integration(format!("non-finite DE error at {snr_db} dB")));
        }
        if error <= cfg.target_error {
            return Ok(DeRun {
                snr_db,
                converged: true,
                iterations: it,
                error,
            });
        }
        if error < 0.98 * best {
            best = error;
            last_gain = it;
        } else if it - last_gain >= cfg.stall_iters {
            return Ok(DeRun {
                snr_db,
                converged: false,
                iterations: it,
                error,
            });
        }
    }
    Ok(DeRun {
        snr_db,
        converged: false,
        iterations: cfg.max_iter,
        error,
    })
}

/// Smallest SNR (to `cfg.precision`) at which density evolution converges.
pub fn de_threshold(ens: &DeEnsemble, cfg: &DeConfig, seed: u64) -> Result<DeThreshold> {
    cfg.validate()?;
    let framing = ens.framing()?;
    let (mut lo, mut hi) = match cfg.bracket {
        Some(b) => b,
        None => {
            let c = ens.rate_limit_db()?;
            (c - cfg.half_width, c + cfg.half_width)
        }
    };
    let mut runs = Vec::new();
    let top = de_run_with(ens, &framing, hi, cfg, seed)?;
    runs.push(top);
    let bottom = de_run_with(ens, &framing, lo, cfg, seed)?;
    runs.push(bottom);
    if !top.converged || bottom.converged {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > cfg.precision {
        let mid = 0.5 * (lo + hi);
        let r = de_run_with(ens, &framing, mid, cfg, seed)?;
        runs.push(r);
        if r.converged {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DeThreshold {
        snr_db: hi,
        lo,
        hi,
        runs,
    })
}

/// When a simulation point stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    pub min_errors: usize,
    pub max_frames: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 50,
            max_frames: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    pub snr_db: f64,
    pub frames: usize,
    pub errors: usize,
    pub fer: f64,
    /// 95 % Clopper–Pearson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl FerPoint {
    pub fn overlaps(&self, other: &FerPoint) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Exact binomial confidence interval at level `1 - alpha`.
pub fn clopper_pearson(errors: usize, frames: usize, alpha: f64) -> (f64, f64) {
    assert!(frames > 0 && errors <= frames);
    let (k, n) = (errors as f64, frames as f64);
    let lo = if errors == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).unwrap().inverse_cdf(alpha / 2.0)
    };
    let hi = if errors == frames {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).unwrap().inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FerConfig {
    pub metric: MetricKind,
    pub stop: StopRule,
    pub max_iter: usize,
    pub seed: u64,
}

/// Frames simulated per scheduling round; fixed so results do not depend on the pool size.
const FER_BATCH: usize = 64;

/// Whether frame `index` at grid point `point` fails.
fn frame_fails(
    sys: &dyn CodedModulation,
    decoder: &mut Decoder<'_>,
    ch: AwgnChannel,
    cfg: &FerConfig,
    point: usize,
    index: usize,
) -> Result<bool> {
    let mut rng = stream_rng(cfg.seed, point as u64, index as u64, 0);
    let bits: Vec<u8> = (0..sys.info_bits_per_frame()).map(|_| rng.gen_range(0..2)).collect();
    let frame = sys.transmit(&bits)?;
    let y = ch.transmit(&frame.symbols, &mut rng);
    let soft = sys.soft_input(&y, ch.sigma(), cfg.metric)?;
    let out = decoder.decode(&soft, cfg.max_iter)?;
    Ok(match sys.receive(&out.hard) {
        Ok(rx) => rx != bits,
        Err(_) => true,
    })
}

/// Frame error rate after the inverse matcher at each SNR.
pub fn run_fer(sys: &dyn CodedModulation, snr_db: &[f64], cfg: &FerConfig) -> Result<Vec<FerPoint>> {
    sys.supports(cfg.metric)?;
    if cfg.stop.min_errors == 0 || cfg.stop.max_frames == 0 {
        return Err(Error::Config("stop rule needs min_errors ≥ 1 and max_frames ≥ 1".into()));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(snr_db.len());
    for (pi, &s) in snr_db.iter().enumerate() {
        let ch = AwgnChannel::from_snr_db(s);
        let (mut frames, mut errors) = (0usize, 0usize);
        'outer: while frames < cfg.stop.max_frames {
            let count = FER_BATCH.min(cfg.stop.max_frames - frames);
            let outcomes: Vec<bool> = (frames..frames + count)
                .into_par_iter()
                .map_init(
                    || Decoder::new(sys.code()),
                    |dec, idx| frame_fails(sys, dec, ch, cfg, pi, idx),
                )
                .collect::<Result<_>>()?;
            for fail in outcomes {
                frames += 1;
                errors += usize::from(fail);
                if errors >= cfg.stop.min_errors {
                    break 'outer;
                }
            }
        }
        let (ci_low, ci_high) = clopper_pearson(errors, frames, 0.05);
        points.push(FerPoint {
            snr_db: s,
            frames,
            errors,
            fer: errors as f64 / frames as f64,
            ci_low,
            ci_high,
            seed: cfg.seed,
        });
    }
    Ok(points)
}
