//! Toeplitz 2-universal hashing and privacy amplification.
//!
//! The `ℓ × n` matrix `T` has `T[i][j] = t_{j−i}`. A seed carries its first
//! row `t_0 … t_{n−1}` followed by the rest of its first column
//! `t_{−1} … t_{−(ℓ−1)}`, which is also the wire order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSeed {
    bits: BitString,
    n: usize,
    ell: usize,
}

impl ToeplitzSeed {
    pub fn new(bits: BitString, n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::arg(format!("output length {ell} must lie in 1..={n}")));
        }
        if bits.len() != n + ell - 1 {
            return Err(Error::arg(format!(
                "seed has {} bits, expected n + ℓ − 1 = {}",
                bits.len(),
                n + ell - 1
            )));
        }
        Ok(Self { bits, n, ell })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, ell: usize, rng: &mut R) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::arg(format!("output length {ell} must lie in 1..={n}")));
        }
        Self::new(BitString::random(n + ell - 1, rng), n, ell)
    }

    /// All-zero seed of the right shape, the default when a seed message is lost.
    pub fn zero(n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::arg(format!("output length {ell} must lie in 1..={n}")));
        }
        Self::new(BitString::zeros(n + ell - 1), n, ell)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::arg(format!("output length {ell} must lie in 1..={n}")));
        }
        Self::new(BitString::from_bytes(bytes, n + ell - 1)?, n, ell)
    }

    /// `t_k` for `k ∈ (−ℓ, n)`.
    pub fn diagonal(&self, k: isize) -> bool {
        if k >= 0 {
            self.bits.get(k as usize)
        } else {
            self.bits.get(self.n - 1 + (-k) as usize)
        }
    }

    /// Diagonals laid out as `t_{−(ℓ−1)}, …, t_{n−1}` so that row `i` is the
    /// contiguous window starting at `ℓ − 1 − i`.
    fn diagonal_strip(&self) -> BitString {
        let lo = -(self.ell as isize - 1);
        (lo..self.n as isize).map(|k| self.diagonal(k)).collect()
    }
}

/// `T x` over GF(2).
pub fn ext(x: &BitString, seed: &ToeplitzSeed) -> Result<BitString> {
    if x.len() != seed.n {
        return Err(Error::arg(format!(
            "input has {} bits but seed expects {}",
            x.len(),
            seed.n
        )));
    }
    let strip = seed.diagonal_strip();
    Ok((0..seed.ell).map(|i| strip.and_parity_at(seed.ell - 1 - i, x)).collect())
}

/// Draws a uniform seed and hashes `x` down to `ell` bits.
pub fn extract_key<R: Rng + ?Sized>(x: &BitString, ell: usize, rng: &mut R) -> Result<(BitString, ToeplitzSeed)> {
    if ell == 0 || ell > x.len() {
        return Err(Error::arg(format!(
            "output length {ell} must lie in 1..={}",
            x.len()
        )));
    }
    let seed = ToeplitzSeed::random(x.len(), ell, rng)?;
    Ok((ext(x, &seed)?, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive(x: &BitString, seed: &ToeplitzSeed) -> BitString {
        (0..seed.ell())
            .map(|i| {
                (0..seed.n()).fold(false, |acc, j| acc ^ (seed.diagonal(j as isize - i as isize) & x.get(j)))
            })
            .collect()
    }

    #[test]
    fn zero_input_hashes_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seed = ToeplitzSeed::random(40, 7, &mut rng).unwrap();
        assert_eq!(ext(&BitString::zeros(40), &seed).unwrap(), BitString::zeros(7));
    }

    #[test]
    fn unit_seed_is_identity() {
        let n = 13;
        let mut bits = BitString::zeros(2 * n - 1);
        bits.set(0, true);
        let seed = ToeplitzSeed::new(bits, n, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = BitString::random(n, &mut rng);
            assert_eq!(ext(&x, &seed).unwrap(), x);
        }
    }

    #[test]
    fn packed_product_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(1..200);
            let ell = rng.gen_range(1..=n);
            let seed = ToeplitzSeed::random(n, ell, &mut rng).unwrap();
            let x = BitString::random(n, &mut rng);
            assert_eq!(ext(&x, &seed).unwrap(), naive(&x, &seed));
        }
    }

    #[test]
    fn matrix_is_toeplitz() {
        // Column j of T is T e_j; consecutive rows must be shifts.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (n, ell) = (9, 5);
        let seed = ToeplitzSeed::random(n, ell, &mut rng).unwrap();
        let cols: Vec<BitString> = (0..n)
            .map(|j| {
                let mut e = BitString::zeros(n);
                e.set(j, true);
                ext(&e, &seed).unwrap()
            })
            .collect();
        for i in 1..ell {
            for j in 1..n {
                assert_eq!(cols[j].get(i), cols[j - 1].get(i - 1));
            }
        }
        // first row then first column
        for j in 0..n {
            assert_eq!(cols[j].get(0), seed.bits().get(j));
        }
        for i in 1..ell {
            assert_eq!(cols[0].get(i), seed.bits().get(n - 1 + i));
        }
    }

    #[test]
    fn linear_in_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..96);
            let ell = rng.gen_range(1..=n);
            let seed = ToeplitzSeed::random(n, ell, &mut rng).unwrap();
            let a = BitString::random(n, &mut rng);
            let b = BitString::random(n, &mut rng);
            let lhs = ext(&a.xor(&b).unwrap(), &seed).unwrap();
            let rhs = ext(&a, &seed).unwrap().xor(&ext(&b, &seed).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn extract_key_replays_and_has_length() {
        let x = BitString::parse("1011001110001111").unwrap();
        let (k1, s1) = extract_key(&x, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let (k2, s2) = extract_key(&x, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!((k1.clone(), s1.clone()), (k2, s2));
        assert_eq!(k1.len(), 5);
        assert_eq!(ext(&x, &s1).unwrap(), k1);
        assert!(extract_key(&x, 0, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
        assert!(extract_key(&x, 17, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn seed_shape_and_wire_round_trip() {
        assert!(ToeplitzSeed::new(BitString::zeros(5), 4, 3).is_err());
        assert!(ToeplitzSeed::new(BitString::zeros(4), 4, 0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = ToeplitzSeed::random(30, 10, &mut rng).unwrap();
        assert_eq!(ToeplitzSeed::from_bytes(&s.to_bytes(), 30, 10).unwrap(), s);
        assert!(ext(&BitString::zeros(29), &s).is_err());
    }
}
