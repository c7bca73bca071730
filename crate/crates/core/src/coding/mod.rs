//! Binary linear codes for the commitment scheme.
//!
//! The production family is Reed–Solomon over GF(2^m) with each symbol
//! expanded to `m` bits: a `(2^m − 1, 2^m − d, d)` RS code becomes a binary
//! `((2^m − 1)m, (2^m − d)m, d)` code. Symbol `i` occupies bits
//! `i·m .. (i+1)·m`, bit `b` of the group being the coefficient of `α^b`.
//!
//! A registry of toy codes (`n ≤ 24`) supports exhaustive oracles.

pub mod gf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
pub use gf::{GaloisField, GfElem};

/// Largest length handled by exhaustive coset search.
pub const TOY_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
enum CodeKind {
    /// Narrow-sense RS code with parity checks `c(α^j) = 0`, `j = 1..d−1`,
    /// possibly shortened to its first `symbols` positions.
    ReedSolomon { field: GaloisField, symbols: usize },
    /// Explicit parity-check matrix; `columns[j]` is the syndrome of `e_j`.
    Explicit { name: String, columns: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    kind: CodeKind,
    n: usize,
    k: usize,
    dmin: usize,
}

/// Serializable description sufficient to rebuild a code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeDescriptor {
    ReedSolomon { m: u32, d: usize, modulus: u32, symbols: usize },
    Explicit { name: String, n: usize, k: usize, dmin: usize, columns: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub bits: BitString,
}

impl Syndrome {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.weight() == 0
    }
}

/// RS-derived binary code of length `(2^m − 1)m` and design distance `d`.
pub fn rs_build(m: u32, d: usize) -> Result<BinaryCode> {
    if !(3..=16).contains(&m) {
        return Err(Error::arg(format!("field degree {m} outside 3..=16")));
    }
    rs_shortened(m, d, (1usize << m) - 1)
}

/// RS code over GF(2^m) restricted to its first `symbols` positions.
pub fn rs_shortened(m: u32, d: usize, symbols: usize) -> Result<BinaryCode> {
    let field = GaloisField::new(m)?;
    let full = field.order();
    if symbols == 0 || symbols > full {
        return Err(Error::arg(format!("symbol count {symbols} outside 1..={full}")));
    }
    if d < 2 || d > symbols {
        return Err(Error::arg(format!("distance {d} outside 2..={symbols}")));
    }
    let m = m as usize;
    Ok(BinaryCode {
        kind: CodeKind::ReedSolomon { field, symbols },
        n: symbols * m,
        k: (symbols + 1 - d) * m,
        dmin: d,
    })
}

/// Hamming(7,4,3): column `j` (1-based) of the parity-check matrix is `j` in binary.
pub fn hamming_7_4() -> BinaryCode {
    BinaryCode {
        kind: CodeKind::Explicit {
            name: "hamming(7,4,3)".into(),
            columns: (1..=7u64).collect(),
        },
        n: 7,
        k: 4,
        dmin: 3,
    }
}

/// Codes small enough for exhaustive search.
pub fn toy_codes() -> Vec<BinaryCode> {
    vec![
        hamming_7_4(),
        rs_shortened(3, 2, 7).expect("valid toy parameters"),
        rs_shortened(3, 3, 7).expect("valid toy parameters"),
        rs_shortened(3, 4, 7).expect("valid toy parameters"),
        rs_shortened(4, 3, 6).expect("valid toy parameters"),
    ]
}

impl BinaryCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Design distance, a lower bound on the binary minimum distance.
    pub fn dmin(&self) -> usize {
        self.dmin
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn is_toy(&self) -> bool {
        self.n <= TOY_MAX_N
    }

    pub fn name(&self) -> String {
        match &self.kind {
            CodeKind::ReedSolomon { field, symbols } => {
                format!("rs(m={}, d={}, symbols={}) -> ({}, {}, {})", field.m(), self.dmin, symbols, self.n, self.k, self.dmin)
            }
            CodeKind::Explicit { name, .. } => name.clone(),
        }
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        match &self.kind {
            CodeKind::ReedSolomon { field, symbols } => CodeDescriptor::ReedSolomon {
                m: field.m(),
                d: self.dmin,
                modulus: field.modulus(),
                symbols: *symbols,
            },
            CodeKind::Explicit { name, columns } => CodeDescriptor::Explicit {
                name: name.clone(),
                n: self.n,
                k: self.k,
                dmin: self.dmin,
                columns: columns.clone(),
            },
        }
    }

    pub fn from_descriptor(desc: &CodeDescriptor) -> Result<Self> {
        match desc {
            CodeDescriptor::ReedSolomon { m, d, modulus, symbols } => {
                let code = rs_shortened(*m, *d, *symbols)?;
                match &code.kind {
                    CodeKind::ReedSolomon { field, .. } if field.modulus() == *modulus => Ok(code),
                    _ => Err(Error::Format(format!("unsupported modulus {modulus:#x} for m={m}"))),
                }
            }
            CodeDescriptor::Explicit { name, n, k, dmin, columns } => {
                if columns.len() != *n || k > n || n - k > 64 {
                    return Err(Error::Format("explicit code descriptor is inconsistent".into()));
                }
                Ok(BinaryCode {
                    kind: CodeKind::Explicit {
                        name: name.clone(),
                        columns: columns.clone(),
                    },
                    n: *n,
                    k: *k,
                    dmin: *dmin,
                })
            }
        }
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::arg(format!("string has {} bits, code length is {}", x.len(), self.n)));
        }
        Ok(())
    }

    /// Parity-check syndrome, `n − k` bits.
    pub fn syndrome(&self, x: &BitString) -> Result<Syndrome> {
        self.check_len(x)?;
        let bits = match &self.kind {
            CodeKind::ReedSolomon { field, .. } => {
                let symbols = self.symbols_of(field, x);
                let mut out = BitString::new();
                for s in rs_syndromes(field, &symbols, self.dmin) {
                    push_symbol(&mut out, s, field.m());
                }
                out
            }
            CodeKind::Explicit { columns, .. } => {
                let acc = (0..self.n).filter(|&j| x.get(j)).fold(0u64, |acc, j| acc ^ columns[j]);
                BitString::from_u64_lsb(acc, self.redundancy())
            }
        };
        Ok(Syndrome { bits })
    }

    fn symbols_of(&self, field: &GaloisField, x: &BitString) -> Vec<GfElem> {
        let m = field.m() as usize;
        (0..self.n / m)
            .map(|i| GfElem((0..m).fold(0u16, |acc, b| acc | ((x.get(i * m + b) as u16) << b))))
            .collect()
    }

    fn bits_of(&self, field: &GaloisField, symbols: &[GfElem]) -> BitString {
        let mut out = BitString::new();
        for &s in symbols {
            push_symbol(&mut out, s, field.m());
        }
        out
    }

    /// Syndrome of every unit vector, packed; only for `n − k ≤ 64`.
    pub fn column_syndromes(&self) -> Result<Vec<u64>> {
        if self.redundancy() > 64 {
            return Err(Error::arg("redundancy exceeds 64 bits"));
        }
        if let CodeKind::Explicit { columns, .. } = &self.kind {
            return Ok(columns.clone());
        }
        (0..self.n)
            .map(|j| {
                let mut e = BitString::zeros(self.n);
                e.set(j, true);
                Ok(self.syndrome(&e)?.bits.to_u64_lsb())
            })
            .collect()
    }

    /// Uniformly random codeword.
    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        match &self.kind {
            CodeKind::ReedSolomon { field, symbols } => {
                // c(x) = u(x) g(x) with g(x) = Π_{j=1}^{d−1} (x − α^j).
                let mut g = vec![GfElem::ONE];
                for j in 1..self.dmin {
                    g = field.mul_poly(&g, &[field.alpha_pow(j as i64), GfElem::ONE]);
                }
                let info = symbols + 1 - self.dmin;
                let mask = field.order() as u16;
                let u: Vec<GfElem> = (0..info).map(|_| GfElem(rng.gen::<u16>() & mask)).collect();
                let mut c = field.mul_poly(&u, &g);
                c.resize(*symbols, GfElem::ZERO);
                self.bits_of(field, &c)
            }
            CodeKind::Explicit { .. } => {
                let basis = self.kernel_basis().expect("explicit codes have small redundancy");
                basis
                    .iter()
                    .filter(|_| rng.gen::<bool>())
                    .fold(BitString::zeros(self.n), |acc, b| acc.xor(b).expect("equal lengths"))
            }
        }
    }

    /// Basis of the code (null space of the parity checks) via GF(2) elimination.
    pub fn kernel_basis(&self) -> Result<Vec<BitString>> {
        let cols = self.column_syndromes()?;
        // Reduce columns to find pivots; track combinations of unit vectors.
        let mut pivots: Vec<(u64, BitString)> = Vec::new();
        let mut basis = Vec::new();
        for (j, &c) in cols.iter().enumerate() {
            let mut v = c;
            let mut combo = BitString::zeros(self.n);
            combo.set(j, true);
            for (p, pc) in &pivots {
                if v ^ p < v {
                    v ^= p;
                    combo = combo.xor(pc)?;
                }
            }
            if v == 0 {
                basis.push(combo);
            } else {
                pivots.push((v, combo));
                pivots.sort_by(|a, b| b.0.cmp(&a.0));
            }
        }
        Ok(basis)
    }

    /// All codewords; toy codes only.
    pub fn codewords(&self) -> Result<Vec<BitString>> {
        if !self.is_toy() {
            return Err(Error::infeasible("toy-code size (n ≤ 24)", format!("n = {}", self.n)));
        }
        let basis = self.kernel_basis()?;
        let mut words = vec![BitString::zeros(self.n)];
        for b in &basis {
            let more: Vec<BitString> = words.iter().map(|w| w.xor(b).expect("equal lengths")).collect();
            words.extend(more);
        }
        Ok(words)
    }

    /// Exact binary minimum distance by exhaustive search; toy codes only.
    pub fn brute_force_min_distance(&self) -> Result<usize> {
        if !self.is_toy() {
            return Err(Error::infeasible("toy-code size (n ≤ 24)", format!("n = {}", self.n)));
        }
        let cols = self.column_syndromes()?;
        for w in 1..=self.n {
            if first_pattern_with_syndrome(&cols, w, 0).is_some() {
                return Ok(w);
            }
        }
        Ok(usize::MAX)
    }
}

fn push_symbol(out: &mut BitString, s: GfElem, m: u32) {
    for b in 0..m {
        out.push((s.0 >> b) & 1 == 1);
    }
}

trait LsbWord {
    fn from_u64_lsb(v: u64, len: usize) -> Self;
    fn to_u64_lsb(&self) -> u64;
}

impl LsbWord for BitString {
    fn from_u64_lsb(v: u64, len: usize) -> Self {
        (0..len).map(|i| (v >> i) & 1 == 1).collect()
    }

    fn to_u64_lsb(&self) -> u64 {
        (0..self.len()).fold(0u64, |acc, i| acc | ((self.get(i) as u64) << i))
    }
}

/// `S_j = Σ_i c_i α^{ij}` for `j = 1..d−1`.
fn rs_syndromes(field: &GaloisField, symbols: &[GfElem], d: usize) -> Vec<GfElem> {
    (1..d)
        .map(|j| {
            let x = field.alpha_pow(j as i64);
            field.eval_poly(symbols, x)
        })
        .collect()
}

/// Lexicographically smallest weight-`w` pattern whose packed syndrome is
/// `target`, enumerating supports in lexicographic bit-string order.
fn first_pattern_with_syndrome(cols: &[u64], w: usize, target: u64) -> Option<Vec<usize>> {
    let n = cols.len();
    if w == 0 {
        return (target == 0).then(Vec::new);
    }
    if w > n {
        return None;
    }
    // Bit strings compare lexicographically with position 0 most significant,
    // so the smallest weight-w string puts its ones as late as possible:
    // enumerate supports from the rightmost combination leftwards.
    let mut best: Option<Vec<usize>> = None;
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        let s = idx.iter().fold(0u64, |acc, &j| acc ^ cols[j]);
        if s == target {
            let better = match &best {
                None => true,
                Some(b) => lex_smaller(&idx, b),
            };
            if better {
                best = Some(idx.clone());
            }
        }
        // next combination
        let mut i = w;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < n - w + i {
                idx[i] += 1;
                for t in i + 1..w {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Compares two equal-weight supports as bit strings (position 0 first).
fn lex_smaller(a: &[usize], b: &[usize]) -> bool {
    // The first differing position decides: the string whose first one
    // appears later is smaller.
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Exhaustive coset search: the string with syndrome `w` nearest to `xhat`,
/// ties broken by the lexicographically smallest error pattern.
pub fn nearest_coset_bruteforce(code: &BinaryCode, xhat: &BitString, w: &Syndrome) -> Result<BitString> {
    code.check_len(xhat)?;
    if !code.is_toy() {
        return Err(Error::infeasible("toy-code size (n ≤ 24)", format!("n = {}", code.n)));
    }
    check_syndrome_len(code, w)?;
    let cols = code.column_syndromes()?;
    let target = code.syndrome(xhat)?.bits.to_u64_lsb() ^ w.bits.to_u64_lsb();
    for weight in 0..=code.n {
        if let Some(support) = first_pattern_with_syndrome(&cols, weight, target) {
            let mut out = xhat.clone();
            for j in support {
                out.set(j, !out.get(j));
            }
            return Ok(out);
        }
    }
    Err(Error::arg("syndrome is not reachable by any error pattern"))
}

fn check_syndrome_len(code: &BinaryCode, w: &Syndrome) -> Result<()> {
    if w.len() != code.redundancy() {
        return Err(Error::arg(format!("syndrome has {} bits, expected {}", w.len(), code.redundancy())));
    }
    Ok(())
}

/// Bounded-distance decoding: succeeds only when the nearest coset element
/// lies strictly within `d/2` of `xhat`, which makes it unique.
pub fn nearest_coset_bounded(code: &BinaryCode, xhat: &BitString, w: &Syndrome) -> Result<BitString> {
    code.check_len(xhat)?;
    check_syndrome_len(code, w)?;
    let target = code.syndrome(xhat)?.bits.xor(&w.bits)?;
    let error = match &code.kind {
        CodeKind::ReedSolomon { field, symbols } => {
            let m = field.m() as usize;
            let syn: Vec<GfElem> = (0..code.dmin - 1)
                .map(|j| GfElem((0..m).fold(0u16, |acc, b| acc | ((target.get(j * m + b) as u16) << b))))
                .collect();
            let e = rs_error_from_syndromes(field, &syn, *symbols)
                .ok_or_else(|| Error::DecodingRadius("syndrome not decodable within the design radius".into()))?;
            code.bits_of(field, &e)
        }
        CodeKind::Explicit { .. } => {
            // Small explicit codes: search patterns of weight < d/2.
            let cols = code.column_syndromes()?;
            let t = target.to_u64_lsb();
            let mut found = None;
            for weight in 0..=code.n {
                if 2 * weight >= code.dmin {
                    break;
                }
                if let Some(s) = first_pattern_with_syndrome(&cols, weight, t) {
                    found = Some(s);
                    break;
                }
            }
            let support = found.ok_or_else(|| Error::DecodingRadius("no error pattern of weight < d/2".into()))?;
            let mut e = BitString::zeros(code.n);
            for j in support {
                e.set(j, true);
            }
            e
        }
    };
    if 2 * error.weight() >= code.dmin {
        return Err(Error::DecodingRadius(format!(
            "nearest pattern found has weight {} ≥ d/2 = {}",
            error.weight(),
            code.dmin as f64 / 2.0
        )));
    }
    if code.syndrome(&error)?.bits != target {
        return Err(Error::DecodingRadius("decoder output fails the syndrome check".into()));
    }
    xhat.xor(&error)
}

/// Exact search on toy codes, bounded-distance decoding otherwise.
pub fn nearest_codeword_coset(code: &BinaryCode, xhat: &BitString, w: &Syndrome) -> Result<BitString> {
    if code.is_toy() {
        nearest_coset_bruteforce(code, xhat, w)
    } else {
        nearest_coset_bounded(code, xhat, w)
    }
}

/// Berlekamp–Massey, Chien search and Forney's formula for a narrow-sense
/// code with syndromes `S_1..S_{d−1}`. Returns the symbol error vector.
fn rs_error_from_syndromes(field: &GaloisField, syn: &[GfElem], symbols: usize) -> Option<Vec<GfElem>> {
    if syn.iter().all(|s| s.is_zero()) {
        return Some(vec![GfElem::ZERO; symbols]);
    }
    let nsyn = syn.len();
    // Berlekamp–Massey
    let mut lambda = vec![GfElem::ONE];
    let mut prev = vec![GfElem::ONE];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut b = GfElem::ONE;
    for k in 0..nsyn {
        let mut delta = syn[k];
        for i in 1..=l.min(lambda.len() - 1) {
            delta += field.mul(lambda[i], syn[k - i]);
        }
        if delta.is_zero() {
            shift += 1;
            continue;
        }
        let coef = field.div(delta, b);
        let mut next = lambda.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, GfElem::ZERO);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] += field.mul(coef, p);
        }
        if 2 * l <= k {
            l = k + 1 - l;
            prev = lambda;
            b = delta;
            shift = 1;
        } else {
            shift += 1;
        }
        lambda = next;
    }
    while lambda.len() > 1 && lambda.last().is_some_and(|c| c.is_zero()) {
        lambda.pop();
    }
    let degree = lambda.len() - 1;
    if degree != l || 2 * l > nsyn {
        return None;
    }
    // Chien search over the (possibly shortened) support.
    let roots: Vec<usize> = (0..symbols)
        .filter(|&i| field.eval_poly(&lambda, field.alpha_pow(-(i as i64))).is_zero())
        .collect();
    if roots.len() != degree {
        return None;
    }
    // Ω(x) = S(x) Λ(x) mod x^{d−1}
    let mut omega = field.mul_poly(syn, &lambda);
    omega.truncate(nsyn);
    let dlambda: Vec<GfElem> = (1..lambda.len())
        .map(|i| if i % 2 == 1 { lambda[i] } else { GfElem::ZERO })
        .collect();
    let mut errors = vec![GfElem::ZERO; symbols];
    for &i in &roots {
        let xinv = field.alpha_pow(-(i as i64));
        let den = field.eval_poly(&dlambda, xinv);
        if den.is_zero() {
            return None;
        }
        errors[i] = field.div(field.eval_poly(&omega, xinv), den);
    }
    Some(errors)
}
