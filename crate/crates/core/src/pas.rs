//! Framing of codewords onto ASK channel uses: the PAS chain with a
//! constant-composition matcher, and the plain uniform chain.
//!
//! PAS bit layout, in the systematic-ordered binary image of a codeword
//! (the `k_c·p` information bits, then the `m_c·p` parity bits):
//!
//! * positions `i·(m-1) .. (i+1)·(m-1)` hold the amplitude label of channel use `i`;
//! * the last `n_extra` information bits are the signs of channel uses `0..n_extra`;
//! * the parity bits are the signs of channel uses `n_extra..n`, in order.

use crate::airs::MetricKind;
use crate::code::NbLdpcCode;
use crate::decoder::SoftInput;
use crate::demap::{
    bit_llrs, bmd_symbol, require_compatible, smd_pas_into, smd_uniform_into, DemapMode,
    PasSymbolKind,
};
use crate::error::{Error, Result};
use crate::galois::{Field, FieldElement};
use crate::mapping::{mb_fit, Constellation, ShapedDistribution};
use crate::matcher::Composition;
use rand::Rng;
use rand_distr::{Distribution, WeightedIndex};
use std::sync::Arc;

/// Where a codeword bit is transmitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitSlot {
    pub channel_use: usize,
    /// 0 is the sign level.
    pub level: usize,
}

/// The PAS bijection between codeword bit positions and `(channel use, level)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PasLayout {
    m: usize,
    p: usize,
    n_c: usize,
    k_c: usize,
    n: usize,
    n_extra: usize,
    slots: Vec<BitSlot>,
    /// Inverse of `slots`, indexed by `channel_use * m + level`.
    positions: Vec<usize>,
}

impl PasLayout {
    pub fn new(m: u32, p: u32, n_c: usize, k_c: usize) -> Result<PasLayout> {
        let (m, p) = (m as usize, p as usize);
        if m < 2 {
            return Err(Error::PasConfig("PAS needs at least 4-ASK".into()));
        }
        if k_c >= n_c {
            return Err(Error::PasConfig(format!("k_c = {k_c} must be below n_c = {n_c}")));
        }
        let total = n_c * p;
        if total % m != 0 {
            return Err(Error::PasConfig(format!(
                "n_c·p = {total} is not a multiple of m = {m}"
            )));
        }
        let n = total / m;
        let amp_bits = n * (m - 1);
        let sys_bits = k_c * p;
        if sys_bits < amp_bits {
            return Err(Error::PasConfig(format!(
                "code rate {k_c}/{n_c} is below (m-1)/m = {}/{m}",
                m - 1
            )));
        }
        let n_extra = sys_bits - amp_bits;
        let mut slots = Vec::with_capacity(total);
        for i in 0..n {
            for level in 1..m {
                slots.push(BitSlot { channel_use: i, level });
            }
        }
        for i in 0..n {
            slots.push(BitSlot { channel_use: i, level: 0 });
        }
        debug_assert_eq!(slots.len(), total);
        let mut positions = vec![usize::MAX; total];
        for (pos, s) in slots.iter().enumerate() {
            positions[s.channel_use * m + s.level] = pos;
        }
        Ok(PasLayout {
            m,
            p,
            n_c,
            k_c,
            n,
            n_extra,
            slots,
            positions,
        })
    }

    /// Channel uses per frame.
    pub fn channel_uses(&self) -> usize {
        self.n
    }

    /// Sign bits taken from the information part.
    pub fn extra_signs(&self) -> usize {
        self.n_extra
    }

    pub fn bits(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, pos: usize) -> BitSlot {
        self.slots[pos]
    }

    pub fn slots(&self) -> &[BitSlot] {
        &self.slots
    }

    pub fn position(&self, channel_use: usize, level: usize) -> usize {
        self.positions[channel_use * self.m + level]
    }

    /// Number of leading codeword symbols made of amplitude bits only.
    fn amplitude_symbols(&self) -> usize {
        self.n * (self.m - 1) / self.p
    }
}

/// Frame order conversions between field symbols and bits.
fn pack(field: &Field, bits: &[u8]) -> Vec<FieldElement> {
    bits.chunks(field.bits() as usize)
        .map(|c| field.beta(c).expect("chunk of p bits"))
        .collect()
}

fn unpack(field: &Field, symbols: &[FieldElement]) -> Vec<u8> {
    let p = field.bits() as usize;
    let mut out = vec![0u8; symbols.len() * p];
    for (s, chunk) in symbols.iter().zip(out.chunks_mut(p)) {
        field.beta_inv_into(*s, chunk);
    }
    out
}

/// A transmitted frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    /// Scaled channel inputs.
    pub symbols: Vec<f64>,
    /// The codeword, in column order.
    pub codeword: Vec<FieldElement>,
}

/// How soft information and uncoded samples are produced for a framing,
/// independently of any particular code. Symbols are in frame order.
pub trait Framing: Send + Sync {
    fn field(&self) -> &Field;
    fn constellation(&self) -> &Constellation;
    fn distribution(&self) -> &ShapedDistribution;
    /// Field symbols per frame.
    fn symbols(&self) -> usize;
    fn channel_uses(&self) -> usize;
    /// Soft input for every symbol in frame order.
    fn soft_frame(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput>;
    /// Labels `(channel use → m-bit label)` for a bit string in frame order.
    fn labels_of(&self, bits: &[u8]) -> Vec<u16>;
    /// Draws channel inputs with the framing's statistics (amplitudes from
    /// `P_A`, uniform signs) and returns them with the frame-order symbols
    /// they represent; no code constraint is imposed.
    fn sample_uncoded<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<FieldElement>)
    where
        Self: Sized;
}

fn modulate(c: &Constellation, dist: &ShapedDistribution, labels: &[u16]) -> Vec<f64> {
    labels
        .iter()
        .map(|&l| dist.scale * c.points()[c.point_of_label(l)])
        .collect()
}

/// Channel framing of the PAS chain without the code and matcher.
#[derive(Clone, Debug)]
pub struct PasFraming {
    constellation: Constellation,
    field: Arc<Field>,
    dist: ShapedDistribution,
    layout: PasLayout,
}

impl PasFraming {
    pub fn new(
        constellation: Constellation,
        field: Arc<Field>,
        dist: ShapedDistribution,
        n_c: usize,
        k_c: usize,
    ) -> Result<PasFraming> {
        let layout = PasLayout::new(constellation.bits(), field.bits(), n_c, k_c)?;
        Ok(PasFraming {
            constellation,
            field,
            dist,
            layout,
        })
    }

    pub fn layout(&self) -> &PasLayout {
        &self.layout
    }

    /// Checks that symbol-metric demapping can run on this layout.
    pub fn smd_supported(&self) -> Result<()> {
        let comp = require_compatible(self.field.bits(), self.constellation.bits(), DemapMode::PasSmd)?;
        let ell = comp.ell.unwrap_or(1);
        if self.layout.n % ell != 0 {
            return Err(Error::PasConfig(format!(
                "{} channel uses do not split into groups of ℓ = {ell} amplitudes",
                self.layout.n
            )));
        }
        Ok(())
    }
}

impl Framing for PasFraming {
    fn field(&self) -> &Field {
        &self.field
    }

    fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    fn distribution(&self) -> &ShapedDistribution {
        &self.dist
    }

    fn symbols(&self) -> usize {
        self.layout.n_c
    }

    fn channel_uses(&self) -> usize {
        self.layout.n
    }

    fn soft_frame(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput> {
        let lay = &self.layout;
        if y.len() != lay.n {
            return Err(Error::Length {
                expected: lay.n,
                got: y.len(),
            });
        }
        let p = lay.p;
        let q = self.field.order();
        let mut data = vec![0.0; lay.n_c * q];
        match metric {
            MetricKind::Bmd => {
                let llr = bit_llrs(y, &self.constellation, &self.dist, sigma);
                let ordered: Vec<f64> = lay
                    .slots
                    .iter()
                    .map(|s| llr.get(s.channel_use, s.level))
                    .collect();
                for (chunk, out) in ordered.chunks(p).zip(data.chunks_mut(q)) {
                    bmd_symbol(chunk, out);
                }
            }
            MetricKind::Smd => {
                self.smd_supported()?;
                let amp_syms = lay.amplitude_symbols();
                let mut seg = Vec::with_capacity(p);
                for (s, out) in data.chunks_mut(q).enumerate() {
                    seg.clear();
                    let kind = if s < amp_syms {
                        let ell = p / (lay.m - 1);
                        seg.extend_from_slice(&y[s * ell..(s + 1) * ell]);
                        PasSymbolKind::Amplitude
                    } else {
                        seg.extend((s * p..(s + 1) * p).map(|pos| y[lay.slots[pos].channel_use]));
                        PasSymbolKind::Sign
                    };
                    smd_pas_into(&seg, kind, &self.constellation, &self.dist, sigma, out);
                }
            }
        }
        SoftInput::new_unchecked(q, data)
    }

    fn labels_of(&self, bits: &[u8]) -> Vec<u16> {
        let m = self.layout.m;
        let mut labels = vec![0u16; self.layout.n];
        for (pos, &b) in bits.iter().enumerate() {
            let s = self.layout.slots[pos];
            labels[s.channel_use] |= u16::from(b) << (m - 1 - s.level);
        }
        labels
    }

    fn sample_uncoded<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<FieldElement>) {
        let c = &self.constellation;
        let m = self.layout.m;
        let amp = WeightedIndex::new(&self.dist.p_amp).expect("valid amplitude distribution");
        let labels: Vec<u16> = (0..self.layout.n)
            .map(|_| {
                let a = amp.sample(rng);
                let sign: u16 = rng.gen_range(0..2);
                (sign << (m - 1)) | c.amplitude_label(a)
            })
            .collect();
        let mut bits = vec![0u8; self.layout.bits()];
        for (pos, b) in bits.iter_mut().enumerate() {
            let s = self.layout.slots[pos];
            *b = ((labels[s.channel_use] >> (m - 1 - s.level)) & 1) as u8;
        }
        (modulate(c, &self.dist, &labels), pack(&self.field, &bits))
    }
}

/// What fixes the matcher rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateTarget {
    /// Transmission rate `η`; the matcher rate follows as `η - 1 + (1 - R_c)·m`.
    Eta(f64),
    /// Matcher rate directly.
    MatcherRate(f64),
}

/// The full PAS transmitter/receiver configuration.
#[derive(Clone, Debug)]
pub struct PasConfig {
    framing: PasFraming,
    code: Arc<NbLdpcCode>,
    composition: Composition,
    target_rdm: f64,
    /// Frame position (systematic order) to column.
    col_of: Vec<usize>,
}

impl PasConfig {
    pub fn build(constellation: Constellation, code: Arc<NbLdpcCode>, target: RateTarget) -> Result<PasConfig> {
        let m = constellation.bits();
        let field = code.field().clone();
        let p = field.bits() as usize;
        let (n_c, k_c) = (code.len(), code.dimension());
        if m < 2 {
            return Err(Error::PasConfig("PAS needs at least 4-ASK".into()));
        }
        if (n_c * p) % m as usize != 0 {
            return Err(Error::PasConfig(format!(
                "n_c·p = {} is not a multiple of m = {m}",
                n_c * p
            )));
        }
        if k_c * (m as usize) < n_c * (m as usize - 1) {
            return Err(Error::PasConfig(format!(
                "code rate {k_c}/{n_c} is below (m-1)/m = {}/{m}",
                m - 1
            )));
        }
        let r_c = k_c as f64 / n_c as f64;
        let rdm = match target {
            RateTarget::Eta(eta) => eta - 1.0 + (1.0 - r_c) * m as f64,
            RateTarget::MatcherRate(r) => r,
        };
        if !(rdm > 0.0 && rdm <= (m - 1) as f64 + 1e-12) {
            return Err(Error::PasConfig(format!(
                "implied matcher rate {rdm} outside (0, {}]",
                m - 1
            )));
        }
        let dist = mb_fit(&constellation, rdm.min((m - 1) as f64))?;
        let framing = PasFraming::new(constellation, field, dist, n_c, k_c)?;
        let n = framing.layout.n;
        let composition = Composition::for_distribution(&framing.dist.p_amp, n)?;
        let col_of = code
            .info_columns()
            .iter()
            .chain(code.parity_columns())
            .copied()
            .collect();
        Ok(PasConfig {
            framing,
            code,
            composition,
            target_rdm: rdm,
            col_of,
        })
    }

    pub fn framing(&self) -> &PasFraming {
        &self.framing
    }

    pub fn layout(&self) -> &PasLayout {
        &self.framing.layout
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// Requested matcher rate.
    pub fn target_matcher_rate(&self) -> f64 {
        self.target_rdm
    }

    /// Realized `k/n`.
    pub fn matcher_rate(&self) -> f64 {
        self.composition.rate()
    }

    /// Matcher input bits `k`.
    pub fn matcher_bits(&self) -> usize {
        self.composition.input_bits()
    }

    /// `R_dm·n` for the requested matcher rate.
    pub fn ideal_matcher_bits(&self) -> f64 {
        self.target_rdm * self.channel_uses() as f64
    }

    /// `η = R_dm + 1 - (1 - R_c)·m` with the requested matcher rate.
    pub fn ideal_eta(&self) -> f64 {
        let m = self.framing.constellation.bits() as f64;
        self.target_rdm + 1.0 - (1.0 - self.code.rate()) * m
    }

    /// Transmission rate with the realized matcher.
    pub fn eta(&self) -> f64 {
        self.info_bits_per_frame() as f64 / self.channel_uses() as f64
    }

    /// Systematic frame position of each column, inverse of the internal map.
    pub fn frame_position_of_column(&self) -> Vec<usize> {
        let mut out = vec![0; self.col_of.len()];
        for (pos, &c) in self.col_of.iter().enumerate() {
            out[c] = pos;
        }
        out
    }
}

/// A coded modulation scheme the simulator can drive.
pub trait CodedModulation: Send + Sync {
    fn code(&self) -> &NbLdpcCode;
    fn constellation(&self) -> &Constellation;
    fn distribution(&self) -> &ShapedDistribution;
    fn channel_uses(&self) -> usize;
    fn info_bits_per_frame(&self) -> usize;
    fn transmit(&self, info_bits: &[u8]) -> Result<Frame>;
    /// Decoder input in column order.
    fn soft_input(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput>;
    /// Recovers the information bits; any inconsistency is an error (a frame error).
    fn receive(&self, codeword: &[FieldElement]) -> Result<Vec<u8>>;
    /// Checks that `metric` can be used with this scheme.
    fn supports(&self, metric: MetricKind) -> Result<()>;
}

impl CodedModulation for PasConfig {
    fn code(&self) -> &NbLdpcCode {
        &self.code
    }

    fn constellation(&self) -> &Constellation {
        &self.framing.constellation
    }

    fn distribution(&self) -> &ShapedDistribution {
        &self.framing.dist
    }

    fn channel_uses(&self) -> usize {
        self.framing.layout.n
    }

    /// `k + n_extra`.
    fn info_bits_per_frame(&self) -> usize {
        self.composition.input_bits() + self.framing.layout.n_extra
    }

    fn transmit(&self, info_bits: &[u8]) -> Result<Frame> {
        let expected = self.info_bits_per_frame();
        if info_bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                got: info_bits.len(),
            });
        }
        let lay = &self.framing.layout;
        let c = &self.framing.constellation;
        let field = &self.framing.field;
        let k = self.composition.input_bits();
        let amps = self.composition.encode(&info_bits[..k])?;
        let bits_per_amp = lay.m - 1;
        let mut sys = Vec::with_capacity(lay.k_c * lay.p);
        for &a in &amps {
            let l = c.amplitude_label(a as usize);
            for j in 0..bits_per_amp {
                sys.push(((l >> (bits_per_amp - 1 - j)) & 1) as u8);
            }
        }
        sys.extend_from_slice(&info_bits[k..]);
        debug_assert_eq!(sys.len(), lay.k_c * lay.p);
        let info = pack(field, &sys);
        let codeword = self.code.encode(&info)?;
        let frame_syms: Vec<FieldElement> = self.col_of.iter().map(|&col| codeword[col]).collect();
        let bits = unpack(field, &frame_syms);
        let labels = self.framing.labels_of(&bits);
        Ok(Frame {
            symbols: modulate(c, &self.framing.dist, &labels),
            codeword,
        })
    }

    fn soft_input(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput> {
        let frame = self.framing.soft_frame(y, sigma, metric)?;
        let q = frame.q();
        let mut data = vec![0.0; frame.as_slice().len()];
        for (pos, &col) in self.col_of.iter().enumerate() {
            data[col * q..(col + 1) * q].copy_from_slice(frame.row(pos));
        }
        SoftInput::new_unchecked(q, data)
    }

    fn receive(&self, codeword: &[FieldElement]) -> Result<Vec<u8>> {
        let lay = &self.framing.layout;
        if codeword.len() != lay.n_c {
            return Err(Error::Length {
                expected: lay.n_c,
                got: codeword.len(),
            });
        }
        let c = &self.framing.constellation;
        let field = &self.framing.field;
        let info: Vec<FieldElement> = self.col_of[..lay.k_c].iter().map(|&col| codeword[col]).collect();
        let sys = unpack(field, &info);
        let bits_per_amp = lay.m - 1;
        let amps: Vec<u8> = sys[..lay.n * bits_per_amp]
            .chunks(bits_per_amp)
            .map(|ch| {
                let l = ch.iter().fold(0u16, |a, &b| (a << 1) | u16::from(b));
                c.amplitude_of_label(l) as u8
            })
            .collect();
        let mut out = self.composition.decode(&amps)?;
        out.extend_from_slice(&sys[lay.n * bits_per_amp..]);
        Ok(out)
    }

    fn supports(&self, metric: MetricKind) -> Result<()> {
        match metric {
            MetricKind::Bmd => Ok(()),
            MetricKind::Smd => self.framing.smd_supported(),
        }
    }
}

/// Uniform signaling: consecutive `m`-bit blocks of the codeword's binary
/// image (column order) are Gray-mapped to channel uses.
#[derive(Clone, Debug)]
pub struct UniformFraming {
    constellation: Constellation,
    field: Arc<Field>,
    dist: ShapedDistribution,
    n_c: usize,
    n: usize,
}

impl UniformFraming {
    pub fn new(constellation: Constellation, field: Arc<Field>, n_c: usize) -> Result<UniformFraming> {
        let m = constellation.bits() as usize;
        let total = n_c * field.bits() as usize;
        if total % m != 0 {
            return Err(Error::Config(format!(
                "n_c·p = {total} is not a multiple of m = {m}"
            )));
        }
        Ok(UniformFraming {
            dist: ShapedDistribution::uniform(&constellation),
            constellation,
            field,
            n_c,
            n: total / m,
        })
    }
}

impl Framing for UniformFraming {
    fn field(&self) -> &Field {
        &self.field
    }

    fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    fn distribution(&self) -> &ShapedDistribution {
        &self.dist
    }

    fn symbols(&self) -> usize {
        self.n_c
    }

    fn channel_uses(&self) -> usize {
        self.n
    }

    fn soft_frame(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput> {
        if y.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                got: y.len(),
            });
        }
        let q = self.field.order();
        match metric {
            MetricKind::Bmd => {
                let llr = bit_llrs(y, &self.constellation, &self.dist, sigma);
                crate::demap::bmd_combine(llr.as_slice(), &self.field)
            }
            MetricKind::Smd => {
                let comp =
                    require_compatible(self.field.bits(), self.constellation.bits(), DemapMode::UniformSmd)?;
                let ell = comp.ell.unwrap_or(1);
                let mut data = vec![0.0; self.n_c * q];
                for (i, out) in data.chunks_mut(q).enumerate() {
                    smd_uniform_into(&y[i * ell..(i + 1) * ell], &self.constellation, &self.field, sigma, out);
                }
                SoftInput::new_unchecked(q, data)
            }
        }
    }

    fn labels_of(&self, bits: &[u8]) -> Vec<u16> {
        bits.chunks(self.constellation.bits() as usize)
            .map(|ch| ch.iter().fold(0u16, |a, &b| (a << 1) | u16::from(b)))
            .collect()
    }

    fn sample_uncoded<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<FieldElement>) {
        let bits: Vec<u8> = (0..self.n_c * self.field.bits() as usize)
            .map(|_| rng.gen_range(0..2))
            .collect();
        let labels = self.labels_of(&bits);
        (
            modulate(&self.constellation, &self.dist, &labels),
            pack(&self.field, &bits),
        )
    }
}

/// The uniform chain with a code.
#[derive(Clone, Debug)]
pub struct UniformSystem {
    framing: UniformFraming,
    code: Arc<NbLdpcCode>,
}

impl UniformSystem {
    pub fn new(constellation: Constellation, code: Arc<NbLdpcCode>) -> Result<UniformSystem> {
        let framing = UniformFraming::new(constellation, code.field().clone(), code.len())?;
        Ok(UniformSystem { framing, code })
    }

    pub fn framing(&self) -> &UniformFraming {
        &self.framing
    }

    /// `η = R_c·m`.
    pub fn eta(&self) -> f64 {
        self.info_bits_per_frame() as f64 / self.channel_uses() as f64
    }
}

impl CodedModulation for UniformSystem {
    fn code(&self) -> &NbLdpcCode {
        &self.code
    }

    fn constellation(&self) -> &Constellation {
        &self.framing.constellation
    }

    fn distribution(&self) -> &ShapedDistribution {
        &self.framing.dist
    }

    fn channel_uses(&self) -> usize {
        self.framing.n
    }

    fn info_bits_per_frame(&self) -> usize {
        self.code.dimension() * self.framing.field.bits() as usize
    }

    fn transmit(&self, info_bits: &[u8]) -> Result<Frame> {
        let expected = self.info_bits_per_frame();
        if info_bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                got: info_bits.len(),
            });
        }
        let info = pack(&self.framing.field, info_bits);
        let codeword = self.code.encode(&info)?;
        let bits = unpack(&self.framing.field, &codeword);
        let labels = self.framing.labels_of(&bits);
        Ok(Frame {
            symbols: modulate(&self.framing.constellation, &self.framing.dist, &labels),
            codeword,
        })
    }

    fn soft_input(&self, y: &[f64], sigma: f64, metric: MetricKind) -> Result<SoftInput> {
        self.framing.soft_frame(y, sigma, metric)
    }

    fn receive(&self, codeword: &[FieldElement]) -> Result<Vec<u8>> {
        if codeword.len() != self.code.len() {
            return Err(Error::Length {
                expected: self.code.len(),
                got: codeword.len(),
            });
        }
        let info: Vec<FieldElement> = self.code.info_columns().iter().map(|&c| codeword[c]).collect();
        Ok(unpack(&self.framing.field, &info))
    }

    fn supports(&self, metric: MetricKind) -> Result<()> {
        match metric {
            MetricKind::Bmd => Ok(()),
            MetricKind::Smd => require_compatible(
                self.framing.field.bits(),
                self.framing.constellation.bits(),
                DemapMode::UniformSmd,
            )
            .map(|_| ()),
        }
    }
}
