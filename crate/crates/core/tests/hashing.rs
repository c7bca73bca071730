mod common;

use common::*;
use nsm_core::hashing::{ext, ToeplitzSeed};
use nsm_core::BitString;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ext_matches_direct_toeplitz_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=7 {
        for ell in 1..=n {
            for s in 0..1u64 << (n + ell - 1) {
                let seed = seed_from_index(s, n, ell);
                let sbits: Vec<bool> = seed.bits().iter().collect();
                let x = BitString::random(n, &mut rng);
                let xb: Vec<bool> = x.iter().collect();
                let got: Vec<bool> = ext(&x, &seed).unwrap().iter().collect();
                assert_eq!(got, toeplitz_oracle(&xb, &sbits, ell), "n={n} ℓ={ell} seed={s}");
            }
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(60..300);
        let ell = rng.gen_range(1..=n);
        let seed = ToeplitzSeed::random(n, ell, &mut rng).unwrap();
        let x = BitString::random(n, &mut rng);
        let sbits: Vec<bool> = seed.bits().iter().collect();
        let got: Vec<bool> = ext(&x, &seed).unwrap().iter().collect();
        assert_eq!(got, toeplitz_oracle(&x.iter().collect::<Vec<_>>(), &sbits, ell));
    }
}

#[test]
fn ext_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..200);
        let ell = rng.gen_range(1..=n);
        let seed = ToeplitzSeed::random(n, ell, &mut rng).unwrap();
        let (x, y) = (BitString::random(n, &mut rng), BitString::random(n, &mut rng));
        let lhs = ext(&x.xor(&y).unwrap(), &seed).unwrap();
        let rhs = ext(&x, &seed).unwrap().xor(&ext(&y, &seed).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn exact_two_universality() {
    for n in 1..=8 {
        for ell in 1..=n.min(4) {
            let (lo, hi, seeds) = collision_extremes(n, ell);
            let exact = seeds >> ell;
            assert_eq!((lo, hi), (exact, exact), "n={n} ℓ={ell}");
        }
    }
}

#[test]
fn collision_test_n6_l3() {
    let (_, hi, seeds) = collision_extremes(6, 3);
    assert!(hi as f64 / seeds as f64 <= 0.125);
}

fn flat_sources_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let points = 1usize << n;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << points) {
        if mask.count_ones() as usize == size {
            out.push((0..points).filter(|&x| mask >> x & 1 == 1).collect());
        }
    }
    out
}

#[test]
fn leftover_hash_every_flat_source_up_to_16_points() {
    for n in 1..=4 {
        for ell in 1..=n {
            let tables = all_tables(n, ell);
            for size in 1..=1usize << n {
                let bound = leftover_bound((size as f64).log2(), ell);
                for support in flat_sources_of_size(n, size) {
                    let d = extractor_distance(&tables, ell, std::slice::from_ref(&support));
                    assert!(d <= bound + 1e-12, "n={n} ℓ={ell} {support:?}: {d} > {bound}");
                }
            }
        }
    }
}

/// Uniform on `a ⊕ span(basis)`.
fn affine_subspace(basis: &[usize], offset: usize) -> Vec<usize> {
    let mut pts = vec![offset];
    for &b in basis {
        let more: Vec<usize> = pts.iter().map(|p| p ^ b).collect();
        pts.extend(more);
    }
    pts.sort_unstable();
    pts.dedup();
    pts
}

#[test]
fn leftover_hash_flat_sources_on_256_points() {
    let (n, ell) = (8, 2);
    let tables = all_tables(n, ell);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 2..=8usize {
        let size = 1usize << k;
        let bound = leftover_bound(k as f64, ell);
        for _ in 0..40 {
            // classical side information: four values of E, each with its own support
            let supports: Vec<Vec<usize>> = (0..4).map(|_| sample(&mut rng, 256, size).into_vec()).collect();
            assert!(extractor_distance(&tables, ell, &supports) <= bound);
            let mut basis = Vec::new();
            while affine_subspace(&basis, 0).len() < size {
                basis.push(rng.gen_range(1..256));
            }
            let sub = affine_subspace(&basis, rng.gen_range(0..256));
            assert_eq!(sub.len(), size);
            assert!(extractor_distance(&tables, ell, &[sub]) <= bound);
        }
    }
    let full: Vec<usize> = (0..256).collect();
    assert!(extractor_distance(&tables, ell, &[full]) <= 2f64.powi(-4));
}
