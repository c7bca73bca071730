#![allow(dead_code)]

use nsm_core::hashing::{ext, ToeplitzSeed};
use nsm_core::BitString;

/// Direct Toeplitz product with `T[i][j] = t_{j−i}`; `t_k = seed[k]` for
/// `k ≥ 0` and `t_{−i} = seed[n + i − 1]`.
pub fn toeplitz_oracle(x: &[bool], seed: &[bool], ell: usize) -> Vec<bool> {
    let n = x.len();
    assert_eq!(seed.len(), n + ell - 1);
    let t = |k: isize| if k >= 0 { seed[k as usize] } else { seed[n - 1 + (-k) as usize] };
    (0..ell)
        .map(|i| (0..n).fold(false, |acc, j| acc ^ (t(j as isize - i as isize) & x[j])))
        .collect()
}

fn bits_of(v: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect()
}

pub fn seed_from_index(index: u64, n: usize, ell: usize) -> ToeplitzSeed {
    let bits: BitString = bits_of(index, n + ell - 1).into_iter().collect();
    ToeplitzSeed::new(bits, n, ell).unwrap()
}

/// `table[x] = ext(x, seed)` as an integer, for every `x ∈ {0,1}^n`.
pub fn hash_table(seed: &ToeplitzSeed) -> Vec<u64> {
    let n = seed.n();
    (0..1u64 << n)
        .map(|x| ext(&BitString::from_u64(x, n), seed).unwrap().to_u64())
        .collect()
}

/// All hash tables of the family `(n, ℓ)`.
pub fn all_tables(n: usize, ell: usize) -> Vec<Vec<u64>> {
    (0..1u64 << (n + ell - 1)).map(|s| hash_table(&seed_from_index(s, n, ell))).collect()
}

/// Minimum and maximum, over pairs `x ≠ x′`, of the number of seeds on which
/// they collide; plus the number of seeds.
pub fn collision_extremes(n: usize, ell: usize) -> (u64, u64, u64) {
    let size = 1usize << n;
    let tables = all_tables(n, ell);
    let mut counts = vec![0u32; size * size];
    for table in &tables {
        for x in 0..size {
            for y in x + 1..size {
                if table[x] == table[y] {
                    counts[x * size + y] += 1;
                }
            }
        }
    }
    let pairs = (0..size).flat_map(|x| (x + 1..size).map(move |y| (x, y)));
    let (mut lo, mut hi) = (u64::MAX, 0);
    for (x, y) in pairs {
        let c = counts[x * size + y] as u64;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo, hi, tables.len() as u64)
}

/// Exact distance of `(Ext(X, R), R, E)` from `(U, R, E)` where `X | E = e`
/// is uniform on `supports[e]` and `E` is uniform.
pub fn extractor_distance(tables: &[Vec<u64>], ell: usize, supports: &[Vec<usize>]) -> f64 {
    let outputs = 1usize << ell;
    let uniform = 1.0 / outputs as f64;
    let mut total = 0.0;
    for support in supports {
        let p = 1.0 / support.len() as f64;
        for table in tables {
            let mut dist = vec![0.0; outputs];
            for &x in support {
                dist[table[x] as usize] += p;
            }
            total += 0.5 * dist.iter().map(|d| (d - uniform).abs()).sum::<f64>();
        }
    }
    total / (tables.len() * supports.len()) as f64
}

/// `2^{−(k − ℓ)/2 − 1}`.
pub fn leftover_bound(k: f64, ell: usize) -> f64 {
    (-(k - ell as f64) / 2.0 - 1.0).exp2()
}

/// `ε(δ, n)` in the `(δ/4)` form of the dishonest-receiver statement.
pub fn wse_error_reference(delta: f64, n: f64) -> f64 {
    let q = delta / 4.0;
    let c = 2.0 + (4.0 / delta).ln() / std::f64::consts::LN_2;
    2.0 * (-(q * q) * n / (32.0 * c * c)).exp()
}

/// `41 · 2^{−λ² n/(512 ω² β)} + 2ε`, written with natural exponentials.
pub fn ot_error_reference(lambda: f64, eps: f64, n: f64, omega: f64, beta: f64) -> f64 {
    let rate = lambda * lambda / (512.0 * omega * omega * beta);
    41.0 * (-(rate * n) * std::f64::consts::LN_2).exp() + 2.0 * eps
}

/// Agreement to 12 significant digits.
pub fn agree12(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 5e-12 * a.abs().max(b.abs())
}

/// Two-sided 99% Wilson interval.
pub fn wilson99(successes: u64, trials: u64) -> (f64, f64) {
    let z = 2.575_829_303_548_9;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (center - half, center + half)
}
