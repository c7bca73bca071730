//! Storage channel models and the quantities the security statements need:
//! classical capacity, minimum output Rényi entropy, the strong-converse
//! exponent and the resulting bound on the decoding success probability.
//!
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stand-in for `α → ∞` when reporting where the exponent is attained.
pub const ALPHA_MAX: f64 = 1e6;
const GOLDEN_TOL: f64 = 1e-10;
const SCAN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// `ρ ↦ rρ + (1 − r) I/d`.
    Depolarizing { d: u32, r: f64 },
    /// `ρ ↦ rρ + (1−r)/2 (XρX + ZρZ)` on one qubit.
    TwoPauli { r: f64 },
    /// Noise-free storage of a `d`-dimensional system.
    Identity { d: u32 },
}

impl ChannelModel {
    pub fn depolarizing(d: u32, r: f64) -> Result<Self> {
        let m = ChannelModel::Depolarizing { d, r };
        m.validate()?;
        Ok(m)
    }

    pub fn two_pauli(r: f64) -> Result<Self> {
        let m = ChannelModel::TwoPauli { r };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(d: u32) -> Result<Self> {
        let m = ChannelModel::Identity { d };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let check_r = |r: f64| {
            if (0.0..=1.0).contains(&r) {
                Ok(())
            } else {
                Err(Error::arg(format!("noise parameter {r} outside [0,1]")))
            }
        };
        let check_d = |d: u32| {
            if d >= 2 {
                Ok(())
            } else {
                Err(Error::arg(format!("dimension {d} must be at least 2")))
            }
        };
        match *self {
            ChannelModel::Depolarizing { d, r } => {
                check_d(d)?;
                check_r(r)
            }
            ChannelModel::TwoPauli { r } => check_r(r),
            ChannelModel::Identity { d } => check_d(d),
        }
    }

    pub fn dim(&self) -> u32 {
        match *self {
            ChannelModel::Depolarizing { d, .. } | ChannelModel::Identity { d } => d,
            ChannelModel::TwoPauli { .. } => 2,
        }
    }

    pub fn log_dim(&self) -> f64 {
        (self.dim() as f64).log2()
    }

    pub fn is_noiseless(&self) -> bool {
        matches!(self, ChannelModel::Identity { .. })
    }

    /// Eigenvalues of the purest output state, largest first.
    ///
    /// Every model here has a minimum-output-entropy state whose output
    /// spectrum minimises all Rényi entropies simultaneously.
    fn min_output_spectrum(&self) -> (f64, f64, usize) {
        match *self {
            ChannelModel::Depolarizing { d, r } => {
                let d = d as f64;
                let q = (1.0 - r) / d;
                (r + q, q, (d as usize) - 1)
            }
            ChannelModel::TwoPauli { r } => {
                let shrink = two_pauli_shrink(r);
                ((1.0 + shrink) / 2.0, (1.0 - shrink) / 2.0, 1)
            }
            ChannelModel::Identity { d } => (1.0, 0.0, d as usize - 1),
        }
    }
}

/// Largest Bloch-vector contraction of the two-Pauli channel, as tabulated
/// in its capacity formula.
fn two_pauli_shrink(r: f64) -> f64 {
    r.max(2.0 * r - 1.0)
}

fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Binary entropy.
pub fn h2(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Classical capacity in bits per channel use.
pub fn capacity(model: &ChannelModel) -> f64 {
    match *model {
        ChannelModel::Depolarizing { d, r } => {
            let df = d as f64;
            let q = (1.0 - r) / df;
            df.log2() + xlog2x(r + q) + (df - 1.0) * xlog2x(q)
        }
        ChannelModel::TwoPauli { r } => 1.0 - h2((1.0 + two_pauli_shrink(r)) / 2.0),
        ChannelModel::Identity { d } => (d as f64).log2(),
    }
}

/// Minimum output `α`-Rényi entropy; `α = 1` is the von Neumann limit and
/// `α = ∞` the min-entropy limit.
pub fn min_output_renyi(model: &ChannelModel, alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::arg(format!("Rényi order {alpha} must be at least 1")));
    }
    let (p, q, mult) = model.min_output_spectrum();
    let m = mult as f64;
    if alpha == 1.0 {
        return Ok(-xlog2x(p) - m * xlog2x(q));
    }
    if alpha.is_infinite() {
        return Ok(-p.log2());
    }
    // log(p^α + m q^α) = α log p + log(1 + m (q/p)^α)
    let ratio = if q > 0.0 { m * (q / p).powf(alpha) } else { 0.0 };
    let log_sum = alpha * p.log2() + ratio.ln_1p() / std::f64::consts::LN_2;
    Ok((log_sum / (1.0 - alpha)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseExponent {
    pub rate: f64,
    pub gamma: f64,
    /// Maximising Rényi order; [`ALPHA_MAX`] when the `α → ∞` limit wins.
    pub argmax_alpha: f64,
}

/// `(1 − 1/α)(R − log d + S^min_α)` as a function of `u = 1 − 1/α`.
fn exponent_objective(model: &ChannelModel, rate: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let alpha = 1.0 / (1.0 - u);
    let s = min_output_renyi(model, alpha).expect("alpha >= 1 by construction");
    u * (rate - model.log_dim() + s)
}

fn alpha_of(u: f64) -> f64 {
    if u >= 1.0 {
        ALPHA_MAX
    } else {
        (1.0 / (1.0 - u)).min(ALPHA_MAX)
    }
}

/// `γ(R) = max_{α ≥ 1} (α−1)/α · (R − log d + S^min_α)`, clamped at zero.
///
/// The objective is maximised over `u = 1 − 1/α ∈ [0, 1)` by a coarse scan
/// followed by golden-section refinement, and compared with the closed-form
/// `α → ∞` limit `R − log d − log p_max`.
pub fn converse_exponent(model: &ChannelModel, rate: f64) -> Result<ConverseExponent> {
    model.validate()?;
    if !(rate >= 0.0) {
        return Err(Error::arg(format!("rate {rate} must be non-negative")));
    }
    let u_hi = 1.0 - 1.0 / ALPHA_MAX;
    let f = |u: f64| exponent_objective(model, rate, u);

    let mut best_u = 0.0;
    let mut best = 0.0;
    for i in 1..=SCAN_POINTS {
        let u = u_hi * i as f64 / SCAN_POINTS as f64;
        let v = f(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let step = u_hi / SCAN_POINTS as f64;
    let (mut a, mut b) = ((best_u - step).max(0.0), (best_u + step).min(u_hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (u, v) in [(c, fc), (d, fd)] {
        if v > best {
            best = v;
            best_u = u;
        }
    }

    let limit = rate - model.log_dim() + min_output_renyi(model, f64::INFINITY)?;
    let (gamma, argmax_alpha) = if limit > best {
        (limit, ALPHA_MAX)
    } else if best > 0.0 {
        (best, alpha_of(best_u))
    } else {
        (0.0, 1.0)
    };
    Ok(ConverseExponent {
        rate,
        gamma,
        argmax_alpha,
    })
}

/// Memory available to a dishonest receiver: `ν n` uses of `model`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageSpec {
    pub model: ChannelModel,
    pub nu: f64,
}

impl StorageSpec {
    pub fn new(model: ChannelModel, nu: f64) -> Result<Self> {
        model.validate()?;
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::arg(format!("storage rate {nu} must be a finite non-negative number")));
        }
        Ok(Self { model, nu })
    }

    /// `C_N · ν`.
    pub fn capacity_load(&self) -> f64 {
        capacity(&self.model) * self.nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRegime {
    /// Holds for every `n`.
    Exact,
    /// Strong-converse bound, valid for `n ≥ n₀` only.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessBound {
    /// `log₂` of the bound; kept separately because the bound underflows.
    pub log2_value: f64,
    pub regime: BoundRegime,
}

impl SuccessBound {
    pub fn value(&self) -> f64 {
        self.log2_value.exp2()
    }
}

/// Upper bound on the probability of sending `nR` bits through `ν n`
/// stored systems.
pub fn p_succ_bound(storage: &StorageSpec, n: usize, rate: f64) -> Result<SuccessBound> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if !(rate > 0.0) {
        return Err(Error::arg(format!("rate {rate} must be positive")));
    }
    let n = n as f64;
    let nu = storage.nu;
    if nu == 0.0 {
        return Ok(SuccessBound {
            log2_value: -n * rate,
            regime: BoundRegime::Exact,
        });
    }
    match storage.model {
        ChannelModel::Identity { .. } => Ok(SuccessBound {
            log2_value: (-(n * rate - nu * n * storage.model.log_dim())).min(0.0),
            regime: BoundRegime::Exact,
        }),
        _ => {
            let g = converse_exponent(&storage.model, rate / nu)?;
            Ok(SuccessBound {
                log2_value: -n * nu * g.gamma,
                regime: BoundRegime::Asymptotic,
            })
        }
    }
}
