//! Arithmetic in GF(2^m) via log/antilog tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive polynomials for `m = 2..=16`, bit `i` = coefficient of `x^i`.
const PRIMITIVE: [u32; 15] = [
    0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

pub fn primitive_polynomial(m: u32) -> Option<u32> {
    (2..=16).contains(&m).then(|| PRIMITIVE[(m - 2) as usize])
}

/// Element of GF(2^m) in polynomial basis: bit `i` is the coefficient of `α^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GfElem(pub u16);

impl GfElem {
    pub const ZERO: GfElem = GfElem(0);
    pub const ONE: GfElem = GfElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for GfElem {
    type Output = GfElem;
    fn add(self, rhs: GfElem) -> GfElem {
        GfElem(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for GfElem {
    fn add_assign(&mut self, rhs: GfElem) {
        self.0 ^= rhs.0;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    modulus: u32,
    exp: Vec<u16>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(m: u32) -> Result<Self> {
        let modulus = primitive_polynomial(m).ok_or_else(|| Error::arg(format!("field degree {m} outside 2..=16")))?;
        Self::with_modulus(m, modulus)
    }

    /// Builds the tables, rejecting a modulus under which `α` is not primitive.
    pub fn with_modulus(m: u32, modulus: u32) -> Result<Self> {
        if !(2..=16).contains(&m) || modulus >> m != 1 {
            return Err(Error::arg(format!("modulus {modulus:#x} is not of degree {m}")));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; order + 1];
        let mut seen = vec![false; order + 1];
        let mut v: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if seen[v as usize] {
                return Err(Error::arg(format!("modulus {modulus:#x} is not primitive")));
            }
            seen[v as usize] = true;
            *slot = v as u16;
            log[v as usize] = i as u32;
            v <<= 1;
            if v >> m != 0 {
                v ^= modulus;
            }
        }
        if v != 1 {
            return Err(Error::arg(format!("modulus {modulus:#x} is not primitive")));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { m, modulus, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Multiplicative group order `2^m − 1`.
    pub fn order(&self) -> usize {
        (1usize << self.m) - 1
    }

    pub fn mul(&self, a: GfElem, b: GfElem) -> GfElem {
        if a.is_zero() || b.is_zero() {
            return GfElem::ZERO;
        }
        GfElem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: GfElem) -> GfElem {
        assert!(!a.is_zero(), "inverse of zero");
        let order = self.order() as u32;
        GfElem(self.exp[((order - self.log[a.0 as usize]) % order) as usize])
    }

    pub fn div(&self, a: GfElem, b: GfElem) -> GfElem {
        self.mul(a, self.inv(b))
    }

    /// `α^e` for any integer exponent.
    pub fn alpha_pow(&self, e: i64) -> GfElem {
        let order = self.order() as i64;
        GfElem(self.exp[e.rem_euclid(order) as usize])
    }

    pub fn log_of(&self, a: GfElem) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    pub fn pow(&self, a: GfElem, e: u64) -> GfElem {
        if a.is_zero() {
            return if e == 0 { GfElem::ONE } else { GfElem::ZERO };
        }
        let order = self.order() as u64;
        GfElem(self.exp[((self.log[a.0 as usize] as u64 * (e % order)) % order) as usize])
    }

    /// Evaluates `Σ coeffs[i] x^i`.
    pub fn eval_poly(&self, coeffs: &[GfElem], x: GfElem) -> GfElem {
        coeffs.iter().rev().fold(GfElem::ZERO, |acc, &c| self.mul(acc, x) + c)
    }

    pub fn mul_poly(&self, a: &[GfElem], b: &[GfElem]) -> Vec<GfElem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![GfElem::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += self.mul(x, y);
            }
        }
        out
    }
}
