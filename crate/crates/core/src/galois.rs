//! Arithmetic in binary extension fields GF(2^p).
//!
//! Elements are stored as bitmasks in the polynomial basis: bit `i` of
//! [`FieldElement::value`] is the coefficient of `α^i`, where `α` is the
//! class of `x` modulo the field's primitive polynomial. Multiplication and
//! inversion go through discrete-log tables.
//!
//! The bit-string map [`Field::beta`] reads its input most-significant bit
//! first: the first bit of a length-`p` string is the coefficient of
//! `α^(p-1)`. Every other module (demapping, PAS framing) relies on this
//! ordering.

use crate::error::{Error, Result};
use std::fmt;

/// A field element, a bitmask below the field order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Default primitive polynomials, indexed by `p`.
const DEFAULT_POLYS: [u32; 17] = [
    0,
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b1_0011,            // x^4 + x + 1
    0b10_0101,           // x^5 + x^2 + 1
    0b100_0011,          // x^6 + x + 1
    0b1000_1001,         // x^7 + x^3 + 1
    0b1_0001_1101,       // x^8 + x^4 + x^3 + x^2 + 1
    0b10_0001_0001,      // x^9 + x^4 + 1
    0b100_0000_1001,     // x^10 + x^3 + 1
    0b1000_0000_0101,    // x^11 + x^2 + 1
    0b1_0000_0101_0011,  // x^12 + x^6 + x^4 + x + 1
    0b10_0000_0001_1011, // x^13 + x^4 + x^3 + x + 1
    0b100_0100_0100_0011, // x^14 + x^10 + x^6 + x + 1
    0b1000_0000_0000_0011, // x^15 + x + 1
    0b1_0001_0000_0000_1011, // x^16 + x^12 + x^3 + x + 1
];

/// The default primitive polynomial mask for bit-width `p`.
pub fn default_poly(p: u32) -> Result<u32> {
    if !(1..=16).contains(&p) {
        return Err(Error::FieldWidth(p));
    }
    Ok(DEFAULT_POLYS[p as usize])
}

/// GF(2^p) with log/antilog tables.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    q: usize,
    poly: u32,
    /// `exp[k] = α^k`, stored twice over so `exp[log a + log b]` needs no reduction.
    exp: Vec<u16>,
    /// `log[a]`; entry 0 is unused.
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("q", &self.q)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl Field {
    /// Builds GF(2^p). When `poly` is `None` the default polynomial for `p`
    /// is used; either way primitivity is verified by walking the powers of `α`.
    pub fn new(p: u32, poly: Option<u32>) -> Result<Field> {
        let poly = match poly {
            Some(poly) => poly,
            None => default_poly(p)?,
        };
        if !(1..=16).contains(&p) {
            return Err(Error::FieldWidth(p));
        }
        if poly >> p != 1 {
            return Err(Error::NotPrimitive { p, poly });
        }
        let q = 1usize << p;
        let order = q - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; q];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for k in 0..order {
            if x == 0 || seen[x as usize] || (k > 0 && x == 1) {
                return Err(Error::NotPrimitive { p, poly });
            }
            seen[x as usize] = true;
            exp[k] = x as u16;
            log[x as usize] = k as u16;
            x <<= 1;
            if x & (1 << p) != 0 {
                x ^= poly;
            }
        }
        // α^(q-1) must close the cycle.
        if x != 1 {
            return Err(Error::NotPrimitive { p, poly });
        }
        for k in 0..order {
            exp[order + k] = exp[k];
        }
        Ok(Field { p, q, poly, exp, log })
    }

    /// Bit-width `p`.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.p
    }

    /// Field order `q = 2^p`.
    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    /// Primitive polynomial mask, including the leading `x^p` term.
    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// The primitive element `α`.
    pub fn alpha(&self) -> FieldElement {
        FieldElement(self.exp[1 % (self.q - 1)])
    }

    /// `α^k`.
    pub fn alpha_pow(&self, k: usize) -> FieldElement {
        FieldElement(self.exp[k % (self.q - 1)])
    }

    /// Discrete logarithm of a non-zero element.
    pub fn log(&self, a: FieldElement) -> Result<usize> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.log[a.index()] as usize)
    }

    /// Checks `a < q` and wraps it.
    pub fn element(&self, a: u32) -> Option<FieldElement> {
        ((a as usize) < self.q).then_some(FieldElement(a as u16))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let s = self.log[a.index()] as usize + self.log[b.index()] as usize;
        FieldElement(self.exp[s])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let order = self.q - 1;
        let l = self.log[a.index()] as usize;
        Ok(FieldElement(self.exp[(order - l) % order]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The permutation `c ↦ h·c` as a lookup table of length `q`.
    pub fn mul_table(&self, h: FieldElement) -> Vec<u16> {
        self.elements().map(|c| self.mul(h, c).0).collect()
    }

    /// Maps a length-`p` bit string (most significant first) to an element.
    pub fn beta(&self, bits: &[u8]) -> Result<FieldElement> {
        if bits.len() != self.p as usize {
            return Err(Error::BitLength {
                expected: self.p as usize,
                got: bits.len(),
            });
        }
        let v = bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1));
        Ok(FieldElement(v as u16))
    }

    /// The binary image of `c`, most significant bit first.
    pub fn beta_inv(&self, c: FieldElement) -> Vec<u8> {
        let mut out = vec![0u8; self.p as usize];
        self.beta_inv_into(c, &mut out);
        out
    }

    /// Writes the binary image of `c` into `out[..p]`.
    #[inline]
    pub fn beta_inv_into(&self, c: FieldElement, out: &mut [u8]) {
        let p = self.p as usize;
        for (j, o) in out[..p].iter_mut().enumerate() {
            *o = ((c.0 >> (p - 1 - j)) & 1) as u8;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force carry-less multiply and reduce, independent of the tables.
    fn slow_mul(a: u32, b: u32, p: u32, poly: u32) -> u32 {
        let mut r = 0u32;
        for i in 0..p {
            if b >> i & 1 == 1 {
                r ^= a << i;
            }
        }
        for i in (p..2 * p).rev() {
            if r >> i & 1 == 1 {
                r ^= poly << (i - p);
            }
        }
        r
    }

    #[test]
    fn gf2_is_xor_and() {
        let f = Field::new(1, None).unwrap();
        assert_eq!(f.order(), 2);
        for a in 0..2u16 {
            for b in 0..2u16 {
                assert_eq!(f.mul(FieldElement(a), FieldElement(b)).0, a & b);
                assert_eq!(f.add(FieldElement(a), FieldElement(b)).0, a ^ b);
            }
        }
        assert_eq!(f.inv(FieldElement(1)).unwrap(), FieldElement(1));
    }

    #[test]
    fn gf64_default_poly_is_primitive() {
        let f = Field::new(6, None).unwrap();
        assert_eq!(f.poly(), 0b100_0011);
        // α^k ≠ 1 for 0 < k < 63, computed without the tables.
        let mut x = 1u32;
        for k in 1..64 {
            x = slow_mul(x, 2, 6, f.poly());
            if k < 63 {
                assert_ne!(x, 1, "α^{k} = 1");
            }
        }
        assert_eq!(x, 1);
    }

    #[test]
    fn reducible_poly_rejected() {
        assert_eq!(
            Field::new(4, Some(0b1_0001)),
            Err(Error::NotPrimitive { p: 4, poly: 0b1_0001 })
        );
        // x^4 + x^3 + x^2 + x + 1 is irreducible but α has order 5.
        assert!(Field::new(4, Some(0b1_1111)).is_err());
        // Wrong degree.
        assert!(Field::new(4, Some(0b1011)).is_err());
        assert_eq!(Field::new(0, None), Err(Error::FieldWidth(0)));
        assert_eq!(Field::new(17, None), Err(Error::FieldWidth(17)));
    }

    #[test]
    fn all_default_polys_primitive() {
        for p in 1..=16 {
            Field::new(p, None).unwrap();
        }
    }

    #[test]
    fn gf4_hand_values() {
        let f = Field::new(2, None).unwrap();
        assert_eq!(f.mul(FieldElement(2), FieldElement(2)), FieldElement(3));
        assert_eq!(f.inv(FieldElement(2)).unwrap(), FieldElement(3));
        assert_eq!(f.inv(FieldElement::ZERO), Err(Error::ZeroInverse));
    }

    #[test]
    fn tables_match_slow_mul() {
        for p in [2, 3, 5, 6, 8] {
            let f = Field::new(p, None).unwrap();
            for a in 0..f.order() as u32 {
                for b in 0..f.order() as u32 {
                    let fast = f.mul(FieldElement(a as u16), FieldElement(b as u16)).0 as u32;
                    assert_eq!(fast, slow_mul(a, b, p, f.poly()));
                }
            }
        }
    }

    #[test]
    fn alpha_generates_group() {
        for p in [3, 6, 8, 12] {
            let f = Field::new(p, None).unwrap();
            let order = f.order() - 1;
            assert_eq!(f.alpha_pow(order), FieldElement::ONE);
            let mut x = FieldElement::ONE;
            for k in 1..order {
                x = f.mul(x, f.alpha());
                assert_ne!(x, FieldElement::ONE, "p={p} k={k}");
            }
            for a in f.elements().skip(1) {
                assert_eq!(f.alpha_pow(f.log(a).unwrap()), a);
            }
        }
    }

    #[test]
    fn beta_msb_first() {
        let f = Field::new(3, None).unwrap();
        assert_eq!(f.beta(&[1, 0, 0]).unwrap(), f.alpha_pow(2));
        assert_eq!(f.beta(&[1, 0, 0]).unwrap(), FieldElement(4));
        assert_eq!(f.beta(&[0, 0, 0]).unwrap(), FieldElement::ZERO);
        assert_eq!(
            f.beta(&[1, 0]),
            Err(Error::BitLength { expected: 3, got: 2 })
        );
    }

    #[test]
    fn beta_bijection_exhaustive() {
        for p in 1..=8 {
            let f = Field::new(p, None).unwrap();
            let mut hit = vec![false; f.order()];
            for v in 0..f.order() {
                let bits: Vec<u8> = (0..p).rev().map(|i| (v >> i & 1) as u8).collect();
                let c = f.beta(&bits).unwrap();
                assert!(!hit[c.index()]);
                hit[c.index()] = true;
                assert_eq!(f.beta_inv(c), bits);
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms(p in 1u32..=10, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
            let f = Field::new(p, None).unwrap();
            let mask = (f.order() - 1) as u16;
            let (a, b, c) = (FieldElement(a & mask), FieldElement(b & mask), FieldElement(c & mask));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, FieldElement::ONE), a);
            prop_assert_eq!(f.mul(a, FieldElement::ZERO), FieldElement::ZERO);
            if a != FieldElement::ZERO {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }
}
