//! Probability-domain sum-product decoding of non-binary LDPC codes.
//!
//! Edge messages are kept in the check-node labeling: a message on the edge
//! with coefficient `h` is indexed by `w = h·c`. The check constraint then
//! reads `Σ w = 0`, so each check update is an XOR-convolution of the other
//! incoming messages, done in the Walsh–Hadamard domain.

use crate::code::NbLdpcCode;
use crate::error::{Error, Result};
use crate::galois::FieldElement;

/// Probabilities are floored here before normalization.
pub const PROB_FLOOR: f64 = 1e-30;
/// Default iteration budget.
pub const DEFAULT_MAX_ITER: usize = 100;

/// In-place unnormalized Walsh–Hadamard transform. `v.len()` must be a power of two.
#[inline]
pub fn wht_in_place(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Walsh–Hadamard transform of `v`.
pub fn wht(v: &[f64]) -> Result<Vec<f64>> {
    if !v.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(v.len()));
    }
    let mut out = v.to_vec();
    wht_in_place(&mut out);
    Ok(out)
}

/// Floors at [`PROB_FLOOR`] and rescales to sum one.
#[inline]
pub fn normalize(v: &mut [f64]) {
    let mut s = 0.0;
    for x in v.iter_mut() {
        if !(*x > PROB_FLOOR) {
            *x = PROB_FLOOR;
        }
        s += *x;
    }
    let inv = 1.0 / s;
    for x in v.iter_mut() {
        *x *= inv;
    }
}

/// Per-symbol a-priori probabilities, `n_c` rows of length `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftInput {
    q: usize,
    data: Vec<f64>,
}

impl SoftInput {
    /// Wraps a row-major matrix, checking that every row is a distribution.
    pub fn new(q: usize, data: Vec<f64>) -> Result<SoftInput> {
        let s = SoftInput::new_unchecked(q, data)?;
        s.validate()?;
        Ok(s)
    }

    /// Wraps without checking row sums.
    pub fn new_unchecked(q: usize, data: Vec<f64>) -> Result<SoftInput> {
        if q == 0 || data.len() % q != 0 {
            return Err(Error::SoftInput(format!(
                "{} entries do not form rows of length {q}",
                data.len()
            )));
        }
        Ok(SoftInput { q, data })
    }

    /// Uniform rows.
    pub fn uniform(n: usize, q: usize) -> SoftInput {
        SoftInput {
            q,
            data: vec![1.0 / q as f64; n * q],
        }
    }

    /// Point masses on a codeword.
    pub fn indicator(word: &[FieldElement], q: usize) -> SoftInput {
        let mut data = vec![0.0; word.len() * q];
        for (i, c) in word.iter().enumerate() {
            data[i * q + c.index()] = 1.0;
        }
        SoftInput { q, data }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.data.chunks(self.q).enumerate() {
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::SoftInput(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::SoftInput(format!("row {i} sums to {s}")));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.data.len() / self.q
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.q..(i + 1) * self.q]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.q..(i + 1) * self.q]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Per-row argmax, lowest value on ties.
    pub fn hard_decision(&self) -> Vec<FieldElement> {
        self.data.chunks(self.q).map(argmax).collect()
    }
}

#[inline]
fn argmax(row: &[f64]) -> FieldElement {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate() {
        if x > row[best] {
            best = i;
        }
    }
    FieldElement(best as u16)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub hard: Vec<FieldElement>,
    pub converged: bool,
    pub iterations: usize,
}

/// Decoder working memory bound to one code. Reuse it across frames.
pub struct Decoder<'a> {
    code: &'a NbLdpcCode,
    q: usize,
    dc: usize,
    /// Multiplication permutation per edge, `edge * q + c ↦ h·c`.
    perm: Vec<u16>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    transformed: Vec<f64>,
    prefix: Vec<f64>,
    hard: Vec<FieldElement>,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a NbLdpcCode) -> Decoder<'a> {
        let q = code.field().order();
        let dc = code.check_degree();
        let edges = code.checks() * dc;
        let mut tables: Vec<Option<Vec<u16>>> = vec![None; q];
        let mut perm = Vec::with_capacity(edges * q);
        for row in code.rows() {
            for &(_, h) in row {
                let t = tables[h.index()].get_or_insert_with(|| code.field().mul_table(h));
                perm.extend_from_slice(t);
            }
        }
        Decoder {
            code,
            q,
            dc,
            perm,
            v2c: vec![0.0; edges * q],
            c2v: vec![0.0; edges * q],
            transformed: vec![0.0; dc * q],
            prefix: vec![0.0; q],
            hard: vec![FieldElement::ZERO; code.len()],
        }
    }

    /// Flooding-schedule sum-product with early stopping on a zero syndrome.
    pub fn decode(&mut self, input: &SoftInput, max_iter: usize) -> Result<DecodeResult> {
        let code = self.code;
        let q = self.q;
        if input.q() != q || input.len() != code.len() {
            return Err(Error::SoftInput(format!(
                "expected {} rows of length {q}, got {} of length {}",
                code.len(),
                input.len(),
                input.q()
            )));
        }
        if max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        // Initial variable-to-check messages are the priors.
        for i in 0..code.len() {
            let prior = input.row(i);
            for (r, s) in code.column_edges(i) {
                let e = r * self.dc + s;
                let perm = &self.perm[e * q..(e + 1) * q];
                let msg = &mut self.v2c[e * q..(e + 1) * q];
                for (c, &w) in perm.iter().enumerate() {
                    msg[w as usize] = prior[c];
                }
                normalize(msg);
            }
        }
        for it in 1..=max_iter {
            self.check_update();
            self.variable_update(input);
            if code.is_codeword(&self.hard) {
                return Ok(DecodeResult {
                    hard: self.hard.clone(),
                    converged: true,
                    iterations: it,
                });
            }
        }
        Ok(DecodeResult {
            hard: self.hard.clone(),
            converged: false,
            iterations: max_iter,
        })
    }

    fn check_update(&mut self) {
        let q = self.q;
        let dc = self.dc;
        let inv_q = 1.0 / q as f64;
        for r in 0..self.code.checks() {
            let base = r * dc * q;
            self.transformed
                .copy_from_slice(&self.v2c[base..base + dc * q]);
            for s in 0..dc {
                wht_in_place(&mut self.transformed[s * q..(s + 1) * q]);
            }
            // Leave-one-out products: prefix running forward, suffix folded into c2v.
            self.prefix.iter_mut().for_each(|x| *x = 1.0);
            for s in 0..dc {
                let out = &mut self.c2v[base + s * q..base + (s + 1) * q];
                out.copy_from_slice(&self.prefix);
                let t = &self.transformed[s * q..(s + 1) * q];
                for (p, &x) in self.prefix.iter_mut().zip(t) {
                    *p *= x;
                }
            }
            self.prefix.iter_mut().for_each(|x| *x = 1.0);
            for s in (0..dc).rev() {
                let out = &mut self.c2v[base + s * q..base + (s + 1) * q];
                for (o, &p) in out.iter_mut().zip(self.prefix.iter()) {
                    *o *= p;
                }
                let t = &self.transformed[s * q..(s + 1) * q];
                for (p, &x) in self.prefix.iter_mut().zip(t) {
                    *p *= x;
                }
                wht_in_place(out);
                for o in out.iter_mut() {
                    *o *= inv_q;
                }
                normalize(out);
            }
        }
    }

    fn variable_update(&mut self, input: &SoftInput) {
        let q = self.q;
        let dc = self.dc;
        for i in 0..self.code.len() {
            let [(r1, s1), (r2, s2)] = self.code.column_edges(i);
            let (e1, e2) = (r1 * dc + s1, r2 * dc + s2);
            let prior = input.row(i);
            let p1 = &self.perm[e1 * q..(e1 + 1) * q];
            let p2 = &self.perm[e2 * q..(e2 + 1) * q];
            let m1 = &self.c2v[e1 * q..(e1 + 1) * q];
            let m2 = &self.c2v[e2 * q..(e2 + 1) * q];
            let mut best = 0usize;
            let mut best_val = f64::NEG_INFINITY;
            for c in 0..q {
                let (w1, w2) = (p1[c] as usize, p2[c] as usize);
                let a = prior[c] * m1[w1];
                let b = prior[c] * m2[w2];
                self.v2c[e2 * q + w2] = a;
                self.v2c[e1 * q + w1] = b;
                let post = a * m2[w2];
                if post > best_val {
                    best_val = post;
                    best = c;
                }
            }
            normalize(&mut self.v2c[e1 * q..(e1 + 1) * q]);
            normalize(&mut self.v2c[e2 * q..(e2 + 1) * q]);
            self.hard[i] = FieldElement(best as u16);
        }
    }

    /// Edge messages of the last iteration, for invariant checks.
    pub fn messages(&self) -> (&[f64], &[f64]) {
        (&self.v2c, &self.c2v)
    }
}

/// One-shot decode.
pub fn decode(code: &NbLdpcCode, input: &SoftInput, max_iter: usize) -> Result<DecodeResult> {
    Decoder::new(code).decode(input, max_iter)
}
