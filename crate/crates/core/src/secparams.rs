//! Security parameters: WSE rate and error, security regions, privacy
//! amplification, sampling, and commitment / OT output lengths.
//!
//! All logarithms are base 2. The WSE error term uses the natural exponential.

use serde::{Deserialize, Serialize};

use crate::channels::{capacity, converse_exponent, p_succ_bound, BoundRegime, ChannelModel, StorageSpec};
use crate::coding::{rs_build, BinaryCode};
use crate::error::{Error, Result};
use crate::ihash::SubsetEncoding;

/// Bisection tolerance for curve thresholds.
pub const BISECTION_TOL: f64 = 1e-8;

/// Smallest block width admitted by the sampling argument.
pub const MIN_BLOCK_WIDTH: usize = 67;

/// Upper limit on the sampler overhead `κ = m / (sβ)`.
pub const KAPPA_MAX: f64 = 0.06;

/// `ε(δ, n) = 2 exp(−δ² n / (512 (4 + log 1/δ)²))`.
pub fn wse_error(delta: f64, n: usize) -> f64 {
    let denom = 512.0 * (4.0 + (1.0 / delta).log2()).powi(2);
    2.0 * (-(delta * delta) / denom * n as f64).exp()
}

/// The same bound written with the `(δ/4)` constants of the dishonest-Bob
/// statement: `2 exp(−(δ/4)² n / (32 (2 + log 4/δ)²))`.
pub fn wse_error_dishonest_bob(delta: f64, n: usize) -> f64 {
    let d4 = delta / 4.0;
    let denom = 32.0 * (2.0 + (4.0 / delta).log2()).powi(2);
    2.0 * (-(d4 * d4) / denom * n as f64).exp()
}

/// Smoothing parameter of the BB84 uncertainty relation:
/// `exp(−δ² n / (32 (2 + log 1/δ)²))`.
pub fn uncertainty_epsilon(delta: f64, n: usize) -> f64 {
    let denom = 32.0 * (2.0 + (1.0 / delta).log2()).powi(2);
    (-(delta * delta) * n as f64 / denom).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WseParams {
    pub n: usize,
    pub delta: f64,
    /// Min-entropy rate in bits per qubit.
    pub lambda: f64,
    pub eps: f64,
    pub regime: BoundRegime,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::arg(format!("δ = {delta} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Min-entropy rate `λ = −(1/n) log P_succ((1/2 − δ) n)` and error for the
/// given storage.
pub fn wse_rate(storage: &StorageSpec, n: usize, delta: f64) -> Result<WseParams> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    let load = storage.capacity_load();
    if load >= 0.5 {
        return Err(Error::infeasible("C_N·ν < 1/2", format!("C_N·ν = {load:.12}")));
    }
    if delta >= 0.5 - load {
        return Err(Error::infeasible(
            "δ < 1/2 − C_N·ν",
            format!("δ = {delta}, 1/2 − C_N·ν = {:.12}", 0.5 - load),
        ));
    }
    let bound = p_succ_bound(storage, n, 0.5 - delta)?;
    Ok(WseParams {
        n,
        delta,
        lambda: -bound.log2_value / n as f64,
        eps: wse_error(delta, n),
        regime: bound.regime,
    })
}

/// Asymptotic rate `ν γ((1/2 − δ)/ν)`; `1/2 − δ` for `ν = 0`. No feasibility
/// checks: returns 0 where the exponent vanishes.
pub fn asymptotic_rate(model: &ChannelModel, nu: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if nu == 0.0 {
        return Ok(0.5 - delta);
    }
    Ok(nu * converse_exponent(model, (0.5 - delta) / nu)?.gamma)
}

/// One-parameter channel family indexed by the noise parameter `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelFamily {
    Depolarizing { d: u32 },
    TwoPauli,
}

impl ModelFamily {
    pub fn at(&self, r: f64) -> Result<ChannelModel> {
        match self {
            ModelFamily::Depolarizing { d } => ChannelModel::depolarizing(*d, r),
            ModelFamily::TwoPauli => ChannelModel::two_pauli(r),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelFamily::Depolarizing { d } => format!("depolarizing_d{d}"),
            ModelFamily::TwoPauli => "two_pauli".into(),
        }
    }

    fn capacity_at(&self, r: f64) -> f64 {
        capacity(&self.at(r).expect("r in [0, 1]"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub nu: f64,
    pub r_threshold: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub r: f64,
    pub lambda: f64,
    pub source: String,
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, below: F) -> f64 {
    // `below(x)` holds on [lo, root) and fails on (root, hi].
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest `r` with `C(r) · ν ≤ 1/2`, capped at 1.
pub fn security_threshold(family: ModelFamily, nu: f64) -> Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::arg(format!("ν = {nu} must be finite and non-negative")));
    }
    family.at(0.5)?;
    if nu == 0.0 || family.capacity_at(1.0) * nu < 0.5 {
        return Ok(1.0);
    }
    if family.capacity_at(0.0) * nu >= 0.5 {
        return Ok(0.0);
    }
    Ok(bisect(0.0, 1.0, BISECTION_TOL, |r| family.capacity_at(r) * nu < 0.5))
}

/// Noisy-storage security region: one threshold per `ν`.
pub fn security_region(family: ModelFamily, nu_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    nu_grid
        .iter()
        .map(|&nu| {
            Ok(CurvePoint {
                nu,
                r_threshold: security_threshold(family, nu)?,
                source: family.label(),
            })
        })
        .collect()
}

/// Storage rate at which `C_N · ν` reaches `1/2`; infinite for a zero-capacity channel.
pub fn storage_rate_threshold(model: &ChannelModel) -> Result<f64> {
    model.validate()?;
    let c = capacity(model);
    if c <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut hi = 1.0;
    while c * hi < 0.5 {
        hi *= 2.0;
    }
    Ok(bisect(0.0, hi, 1e-12, |nu| c * nu < 0.5))
}

/// Threshold from the earlier bounded/noisy-storage analysis: `ν r < 1/4`.
pub fn bsm_threshold(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::arg(format!("ν = {nu} must be positive")));
    }
    Ok((1.0 / (4.0 * nu)).min(1.0))
}

pub fn bsm_comparison_curve(nu_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    nu_grid
        .iter()
        .map(|&nu| {
            Ok(CurvePoint {
                nu,
                r_threshold: bsm_threshold(nu)?,
                source: "bsm".into(),
            })
        })
        .collect()
}

/// `λ̃(δ)` along a family at fixed `ν`.
pub fn lambda_vs_r(family: ModelFamily, nu: f64, delta: f64, r_grid: &[f64]) -> Result<Vec<LambdaPoint>> {
    r_grid
        .iter()
        .map(|&r| {
            Ok(LambdaPoint {
                r,
                lambda: asymptotic_rate(&family.at(r)?, nu, delta)?,
                source: family.label(),
            })
        })
        .collect()
}

/// Evenly spaced grid of `count` points on `(0, hi]`.
pub fn open_grid(hi: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| hi * i as f64 / count as f64).collect()
}

/// Privacy-amplification error `2^{−(h − ℓ)/2 − 1} + 2ε`. Values above 1 are
/// returned as they are.
pub fn pa_epsilon(hmin: f64, ell: f64, eps: f64) -> f64 {
    (-0.5 * (hmin - ell) - 1.0).exp2() + 2.0 * eps
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub m: usize,
    pub s: usize,
    pub xi: f64,
    pub gamma_fail: f64,
}

/// Uniform `s`-subsets of `[m]` sample with failure `2^{−s ξ²/2}`.
pub fn sampler_params(m: usize, s: usize, xi: f64) -> Result<SamplerParams> {
    if s == 0 || s >= m {
        return Err(Error::arg(format!("sample size {s} must satisfy 0 < s < m = {m}")));
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::arg(format!("ξ = {xi} must lie in [0, 1]")));
    }
    Ok(SamplerParams {
        m,
        s,
        xi,
        gamma_fail: (-(s as f64) * xi * xi / 2.0).exp2(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcParams {
    pub n: usize,
    pub k: usize,
    pub dmin: usize,
    pub field_degree: u32,
    pub eps_prime: f64,
    pub lambda: f64,
    pub ell: usize,
    pub error: f64,
}

/// `λn − r − 2 log 1/ε′` for a code with redundancy `r = n − k`.
pub fn bc_length(lambda: f64, n: usize, redundancy: usize, eps_prime: f64) -> f64 {
    lambda * n as f64 - redundancy as f64 - 2.0 * (1.0 / eps_prime).log2()
}

/// Code distance needed for binding error `ε′`: `⌈2 log 1/ε′⌉`, at least 2.
pub fn bc_distance(eps_prime: f64) -> Result<usize> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::arg(format!("ε′ = {eps_prime} must lie in (0, 1)")));
    }
    Ok(((2.0 * (1.0 / eps_prime).log2()).ceil() as usize).max(2))
}

/// Field degree `m` with `(2^m − 1) m = n`, if any.
pub fn rs_degree_for_length(n: usize) -> Option<u32> {
    (3..=16u32).find(|&m| ((1usize << m) - 1) * m as usize == n)
}

/// Commitment parameters on the RS-derived code of length `n`.
pub fn bc_params(storage: &StorageSpec, n: usize, delta: f64, eps_prime: f64) -> Result<BcParams> {
    let d = bc_distance(eps_prime)?;
    let m = rs_degree_for_length(n).ok_or_else(|| {
        Error::arg(format!("n = {n} is not of the form (2^m − 1)·m for 3 ≤ m ≤ 16"))
    })?;
    if d > (1usize << m) - 1 {
        return Err(Error::infeasible(
            "d ≤ 2^m − 1",
            format!("d = {d} exceeds the RS length {}", (1usize << m) - 1),
        ));
    }
    let wse = wse_rate(storage, n, delta)?;
    let code = rs_build(m, d)?;
    bc_params_with_lambda(wse.lambda, wse.eps, &code, eps_prime)
}

/// Commitment parameters for a given min-entropy rate and code.
pub fn bc_params_with_lambda(lambda: f64, eps: f64, code: &BinaryCode, eps_prime: f64) -> Result<BcParams> {
    let d = bc_distance(eps_prime)?;
    if code.dmin() < d {
        return Err(Error::infeasible(
            "d ≥ 2 log 1/ε′",
            format!("code distance {} below {d}", code.dmin()),
        ));
    }
    let raw = bc_length(lambda, code.n(), code.redundancy(), eps_prime);
    if raw < 1.0 {
        return Err(Error::infeasible(
            "λn − (n − k) − 2 log 1/ε′ > 0",
            format!("length {raw:.12} (shortfall {:.12})", 1.0 - raw),
        ));
    }
    let field_degree = match code.descriptor() {
        crate::coding::CodeDescriptor::ReedSolomon { m, .. } => m,
        crate::coding::CodeDescriptor::Explicit { .. } => 0,
    };
    Ok(BcParams {
        n: code.n(),
        k: code.k(),
        dmin: code.dmin(),
        field_degree,
        eps_prime,
        lambda,
        ell: raw.floor() as usize,
        error: 2.0 * eps + eps_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtParams {
    pub n: usize,
    pub beta: usize,
    pub m: usize,
    pub omega: f64,
    pub t: usize,
    pub s: usize,
    pub lambda: f64,
    pub ell: usize,
    pub error: f64,
    pub delta_sampler: f64,
    pub kappa: f64,
    /// False for toy parameter sets outside the proven regime.
    pub covered: bool,
}

/// `⌊((ω−1)/ω · λ/8 − λ²/(512 ω² β)) n − 1/2⌋` before flooring.
pub fn ot_length(lambda: f64, n: usize, omega: f64, beta: usize) -> f64 {
    ((omega - 1.0) / omega * lambda / 8.0 - lambda * lambda / (512.0 * omega * omega * beta as f64)) * n as f64 - 0.5
}

/// `41 · 2^{−λ² n / (512 ω² β)} + 2ε`.
pub fn ot_error(lambda: f64, eps: f64, n: usize, omega: f64, beta: usize) -> f64 {
    41.0 * (-(lambda * lambda) * n as f64 / (512.0 * omega * omega * beta as f64)).exp2() + 2.0 * eps
}

/// `2^{−m λ² / (512 ω²)}`.
pub fn sampler_delta(lambda: f64, m: usize, omega: f64) -> f64 {
    (-(m as f64) * lambda * lambda / (512.0 * omega * omega)).exp2()
}

/// `max{67, 256 ω²/λ²}`.
pub fn min_block_width(lambda: f64, omega: f64) -> f64 {
    (MIN_BLOCK_WIDTH as f64).max(256.0 * omega * omega / (lambda * lambda))
}

/// `⌊log C(m, m/4)⌋`, exact up to `m = 10^4` and from a floating-point sum beyond.
pub fn encoding_bits(m: usize) -> Result<usize> {
    if m <= 10_000 {
        return Ok(SubsetEncoding::new(m)?.t());
    }
    if m % 4 != 0 {
        return Err(Error::arg(format!("block count {m} must be divisible by 4")));
    }
    let s = m / 4;
    let log: f64 = (0..s).map(|i| ((m - i) as f64 / (i + 1) as f64).log2()).sum();
    Ok(log.floor() as usize)
}

fn check_ot_shape(n: usize, omega: f64, beta: usize) -> Result<usize> {
    if !(omega >= 2.0) || !omega.is_finite() {
        return Err(Error::arg(format!("ω = {omega} must be at least 2")));
    }
    if beta == 0 || n % beta != 0 {
        return Err(Error::arg(format!("n = {n} must be divisible by β = {beta}")));
    }
    let m = n / beta;
    if m == 0 || m % 4 != 0 {
        return Err(Error::arg(format!("m = n/β = {m} must be a positive multiple of 4")));
    }
    Ok(m)
}

/// `κ = m/(sβ)`, rejected above [`KAPPA_MAX`].
pub fn check_kappa(m: usize, s: usize, beta: usize) -> Result<f64> {
    if s == 0 || beta == 0 {
        return Err(Error::arg("s and β must be positive"));
    }
    let kappa = m as f64 / (s as f64 * beta as f64);
    if kappa > KAPPA_MAX {
        return Err(Error::infeasible("κ ≤ 0.06", format!("κ = {kappa:.12}")));
    }
    Ok(kappa)
}

/// Oblivious-transfer parameters for the given storage.
pub fn ot_params(storage: &StorageSpec, n: usize, delta: f64, omega: f64, beta: usize) -> Result<OtParams> {
    check_ot_shape(n, omega, beta)?;
    let wse = wse_rate(storage, n, delta)?;
    ot_params_with_lambda(wse.lambda, wse.eps, n, omega, beta)
}

/// Oblivious-transfer parameters for a given min-entropy rate.
pub fn ot_params_with_lambda(lambda: f64, eps: f64, n: usize, omega: f64, beta: usize) -> Result<OtParams> {
    let m = check_ot_shape(n, omega, beta)?;
    if !(lambda > 0.0) {
        return Err(Error::infeasible("λ > 0", format!("λ = {lambda}")));
    }
    let need = min_block_width(lambda, omega);
    if (beta as f64) < need {
        return Err(Error::infeasible(
            "β ≥ max{67, 256ω²/λ²}",
            format!("β = {beta}, bound = {need:.12}"),
        ));
    }
    let s = m / 4;
    let kappa = check_kappa(m, s, beta)?;
    let raw = ot_length(lambda, n, omega, beta);
    if raw < 1.0 {
        return Err(Error::infeasible(
            "ℓ ≥ 1",
            format!("((ω−1)/ω·λ/8 − λ²/(512ω²β))n − 1/2 = {raw:.12}"),
        ));
    }
    Ok(OtParams {
        n,
        beta,
        m,
        omega,
        t: encoding_bits(m)?,
        s,
        lambda,
        ell: raw.floor() as usize,
        error: ot_error(lambda, eps, n, omega, beta),
        delta_sampler: sampler_delta(lambda, m, omega),
        kappa,
        covered: true,
    })
}

/// Parameters for desk-scale simulation: block-width and length conditions
/// are not enforced and `ell` is taken as given. The result is marked as not
/// covered by the security statement.
pub fn ot_params_toy(n: usize, beta: usize, ell: usize) -> Result<OtParams> {
    let m = check_ot_shape(n, 2.0, beta)?;
    if ell == 0 || ell > n / 4 {
        return Err(Error::arg(format!("ℓ = {ell} must lie in 1..={}", n / 4)));
    }
    let s = m / 4;
    Ok(OtParams {
        n,
        beta,
        m,
        omega: 2.0,
        t: encoding_bits(m)?,
        s,
        lambda: f64::NAN,
        ell,
        error: f64::NAN,
        delta_sampler: f64::NAN,
        kappa: m as f64 / (s as f64 * beta as f64),
        covered: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn storage(model: ChannelModel, nu: f64) -> StorageSpec {
        StorageSpec::new(model, nu).unwrap()
    }

    #[test]
    fn wse_rate_examples() {
        for delta in [0.01, 0.2, 0.49] {
            let p = wse_rate(&storage(ChannelModel::identity(2).unwrap(), 0.0), 1000, delta).unwrap();
            assert!((p.lambda - (0.5 - delta)).abs() < 1e-12);
        }
        let p = wse_rate(&storage(ChannelModel::identity(2).unwrap(), 0.4), 1000, 0.05).unwrap();
        assert!((p.lambda - 0.05).abs() < 1e-12);

        let model = ChannelModel::depolarizing(2, 0.5).unwrap();
        let p = wse_rate(&storage(model, 1.0), 1000, 0.01).unwrap();
        let g = converse_exponent(&model, 0.49).unwrap().gamma;
        assert!(g > 0.0);
        assert!((p.lambda - g).abs() < 1e-12);
        assert_eq!(p.regime, BoundRegime::Asymptotic);
        assert_eq!(p.eps, wse_error(0.01, 1000));
    }

    #[test]
    fn wse_rate_rejections() {
        let s = storage(ChannelModel::identity(2).unwrap(), 0.6);
        assert!(wse_rate(&s, 10, 0.1).unwrap_err().is_feasibility());
        let s = storage(ChannelModel::identity(2).unwrap(), 0.4);
        assert!(wse_rate(&s, 10, 0.2).unwrap_err().is_feasibility());
        assert!(matches!(wse_rate(&s, 10, 0.0), Err(Error::Argument(_))));
        assert!(matches!(wse_rate(&s, 10, 0.5), Err(Error::Argument(_))));
    }

    #[test]
    fn wse_error_examples() {
        let expected = 2.0 * (-0.0625f64 * 1e6 / (512.0 * 36.0)).exp();
        assert!((wse_error(0.25, 1_000_000) - expected).abs() < 1e-15);
        assert!((wse_error(1e-12, 1000) - 2.0).abs() < 1e-9);
        let mut prev = wse_error(0.1, 1);
        for n in [10, 100, 1000, 10_000, 100_000] {
            let e = wse_error(0.1, n);
            assert!(e < prev);
            prev = e;
        }
        for delta in [0.001, 0.05, 0.3, 0.49] {
            let a = wse_error(delta, 12345);
            let b = wse_error_dishonest_bob(delta, 12345);
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn figure_thresholds() {
        let q = security_threshold(ModelFamily::Depolarizing { d: 2 }, 1.0).unwrap();
        assert!((0.76..=0.79).contains(&q), "{q}");
        let t = security_threshold(ModelFamily::TwoPauli, 1.0).unwrap();
        assert!((t - q).abs() < 1e-7);
        let q3 = security_threshold(ModelFamily::Depolarizing { d: 3 }, 1.0).unwrap();
        assert!((0.60..=0.62).contains(&q3), "{q3}");
        let model = ChannelModel::depolarizing(2, q).unwrap();
        assert!((capacity(&model) - 0.5).abs() < 1e-6);
        assert_eq!(security_threshold(ModelFamily::TwoPauli, 0.0).unwrap(), 1.0);
        assert_eq!(security_threshold(ModelFamily::TwoPauli, 0.4).unwrap(), 1.0);
    }

    #[test]
    fn identity_boundary() {
        let nu = storage_rate_threshold(&ChannelModel::identity(2).unwrap()).unwrap();
        assert!((nu - 0.5).abs() < 1e-6);
        let nu = storage_rate_threshold(&ChannelModel::identity(4).unwrap()).unwrap();
        assert!((nu - 0.25).abs() < 1e-6);
        assert!(storage_rate_threshold(&ChannelModel::depolarizing(2, 0.0).unwrap())
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn thresholds_decrease_and_dominate_bsm() {
        let grid = open_grid(1.0, 50);
        let region = security_region(ModelFamily::Depolarizing { d: 2 }, &grid).unwrap();
        let bsm = bsm_comparison_curve(&grid).unwrap();
        for w in region.windows(2) {
            assert!(w[1].r_threshold <= w[0].r_threshold);
            if w[0].r_threshold < 1.0 {
                assert!(w[1].r_threshold < w[0].r_threshold);
            }
        }
        for (a, b) in region.iter().zip(&bsm) {
            assert!(b.r_threshold <= a.r_threshold);
            if a.r_threshold < 1.0 && b.r_threshold < 1.0 {
                assert!(b.r_threshold < a.r_threshold);
            }
            if a.r_threshold > 0.0 && a.r_threshold < 1.0 {
                let model = ChannelModel::depolarizing(2, a.r_threshold).unwrap();
                assert!((capacity(&model) * a.nu - 0.5).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bsm_examples() {
        assert_eq!(bsm_threshold(1.0).unwrap(), 0.25);
        assert_eq!(bsm_threshold(0.25).unwrap(), 1.0);
        assert_eq!(bsm_threshold(0.5).unwrap(), 0.5);
        assert!(bsm_threshold(0.0).is_err());
    }

    #[test]
    fn pa_epsilon_examples() {
        assert_eq!(pa_epsilon(20.0, 10.0, 0.0), 0.015625);
        assert_eq!(pa_epsilon(7.0, 7.0, 0.0), 0.5);
        assert!((pa_epsilon(1e4, 10.0, 0.01) - 0.02).abs() < 1e-15);
        for h in [10.0, 13.5, 40.0] {
            assert!((pa_epsilon(h + 2.0, 5.0, 0.0) * 2.0 - pa_epsilon(h, 5.0, 0.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn sampler_examples() {
        assert_eq!(sampler_params(10, 3, 0.0).unwrap().gamma_fail, 1.0);
        assert!((sampler_params(1000, 200, 0.4).unwrap().gamma_fail - 2f64.powi(-16)).abs() < 1e-18);
        let a = sampler_params(1000, 100, 0.3).unwrap().gamma_fail;
        assert!(sampler_params(1000, 101, 0.3).unwrap().gamma_fail < a);
        assert!(sampler_params(1000, 100, 0.31).unwrap().gamma_fail < a);
        assert!(sampler_params(10, 10, 0.1).is_err());
        assert!(sampler_params(10, 3, 1.1).is_err());
    }

    #[test]
    fn bc_examples() {
        // ℓ with the redundancy bound d (log n − 1) at n = 10^6.
        let n = 1_000_000usize;
        let d = bc_distance(2f64.powi(-20)).unwrap();
        assert_eq!(d, 40);
        let red = (d as f64 * ((n as f64).log2() - 1.0)).ceil() as usize;
        assert!(bc_length(0.1, n, red, 2f64.powi(-20)) > 0.0);

        assert!(bc_distance(1.0).is_err());
        let code = rs_build(8, 8).unwrap();
        assert!(bc_params_with_lambda(0.0, 0.0, &code, 0.1).unwrap_err().is_feasibility());

        let s = storage(ChannelModel::identity(2).unwrap(), 0.0);
        let p = bc_params(&s, 255 * 8, 0.1, 2f64.powi(-4)).unwrap();
        assert_eq!(p.dmin, 8);
        assert_eq!(p.n - p.k, 7 * 8);
        let expected = (0.4 * 2040.0 - 56.0 - 8.0f64).floor() as usize;
        assert_eq!(p.ell, expected);
        assert!((p.error - (2.0 * wse_error(0.1, 2040) + 2f64.powi(-4))).abs() < 1e-15);
        assert!(bc_params(&s, 1000, 0.1, 0.25).is_err());
    }

    #[test]
    fn lengths_monotone_in_lambda() {
        let code = rs_build(10, 21).unwrap();
        let mut prev_bc = 0;
        let mut prev_ot = 0;
        for i in 1..=40 {
            let lambda = 0.01 * i as f64 + 0.05;
            if let Ok(p) = bc_params_with_lambda(lambda, 0.0, &code, 2f64.powi(-10)) {
                assert!(p.ell >= prev_bc);
                prev_bc = p.ell;
            }
            if let Ok(p) = ot_params_with_lambda(lambda, 0.0, 1 << 24, 2.0, 1 << 16) {
                assert!(p.ell >= prev_ot);
                prev_ot = p.ell;
            }
        }
        assert!(prev_bc > 0 && prev_ot > 0);
    }

    #[test]
    fn ot_examples() {
        let n = 4096 * 4 * 64;
        let p = ot_params_with_lambda(0.5, 0.0, n, 2.0, 4096).unwrap();
        assert!(p.ell > 0);
        assert_eq!(p.m, 256);
        assert_eq!(p.s, 64);
        assert!((p.kappa - 4.0 / 4096.0).abs() < 1e-15);
        let expo = 0.25 / (512.0 * 4.0 * 4096.0);
        assert!((p.error - 41.0 * (-expo * n as f64).exp2()).abs() < 1e-15);
        assert!((p.delta_sampler - (-256.0 * 0.25 / 2048.0f64).exp2()).abs() < 1e-15);
        assert!(p.covered);

        // 256 ω²/λ² = 4096 / 0.09 > 4096
        let err = ot_params_with_lambda(0.3, 0.0, n, 2.0, 4096).unwrap_err();
        assert!(err.is_feasibility());
        assert!(err.to_string().contains("256ω²/λ²"));
        assert!(matches!(ot_params_with_lambda(0.5, 0.0, n + 1, 2.0, 4096), Err(Error::Argument(_))));
        assert!(matches!(ot_params_with_lambda(0.5, 0.0, 4096 * 6, 2.0, 4096), Err(Error::Argument(_))));
        assert!(matches!(ot_params_with_lambda(0.5, 0.0, n, 1.5, 4096), Err(Error::Argument(_))));
    }

    #[test]
    fn kappa_matches_block_width() {
        for beta in [16usize, 66, 67, 68, 200] {
            let kappa = 4.0 / beta as f64;
            assert_eq!(kappa <= KAPPA_MAX, beta >= MIN_BLOCK_WIDTH, "β = {beta}");
        }
        let toy = ot_params_toy(64, 4, 8).unwrap();
        assert!(!toy.covered);
        assert_eq!((toy.m, toy.s, toy.t), (16, 4, 10));
        assert!(ot_params_toy(64, 4, 17).is_err());
        assert!(ot_params_toy(64, 5, 4).is_err());
    }

    #[test]
    fn encoding_bits_float_branch_agrees() {
        let exact = SubsetEncoding::new(10_000).unwrap().t();
        let s = 2500;
        let approx: f64 = (0..s).map(|i| ((10_000 - i) as f64 / (i + 1) as f64).log2()).sum();
        assert_eq!(approx.floor() as usize, exact);
        assert!(encoding_bits(100_000).unwrap() > exact);
    }

    #[test]
    fn lambda_curve_vanishes_near_threshold() {
        let pts = lambda_vs_r(ModelFamily::Depolarizing { d: 2 }, 1.0, 0.01, &[0.1, 0.5, 0.75, 0.9]).unwrap();
        assert!(pts[0].lambda > pts[1].lambda && pts[1].lambda > pts[2].lambda);
        assert_eq!(pts[3].lambda, 0.0);
    }
}
