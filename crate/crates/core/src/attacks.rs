//! Dishonest-party strategies, Monte Carlo estimation of their success, and
//! exact oracles for the entropy lemmas and the BB84 uncertainty relation.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::coding::BinaryCode;
use crate::error::{Error, Result};
use crate::hashing::ext;
use crate::protocols::frot::{frot_run_with, FrotOutcome};
use crate::protocols::{commit_run, open_check, wse_run, wse_run_with, Transport, WseBob};
use crate::qsim::{guess_prob_classical, measure_qubit, Bb84Register, BlochDirection, CcState, DensityOp};
use crate::secparams::{wse_error, OtParams};

/// `z` for a two-sided 99% interval.
pub const Z_99: f64 = 2.575_829_303_548_9;

/// `1/2 + 1/(2√2)`.
pub const BREIDBART_GUESS: f64 = 0.853_553_390_593_273_8;

/// Largest `|X|·|Q|` accepted by the exhaustive lemma checks.
pub const ORACLE_MAX_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureBasis {
    Computational,
    Hadamard,
    /// Independent uniform BB84 basis per qubit.
    Random,
    Breidbart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackStrategy {
    /// Measure every qubit at once.
    MeasureNow { basis: MeasureBasis },
    /// Keep `q` qubits perfectly; measure the rest in random bases.
    BoundedStore { q: usize },
    /// Keep `⌊νn⌋` qubits in depolarizing memory with parameter `r`;
    /// measure the rest in the Breidbart basis.
    NoisyStore { r: f64, nu: f64 },
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackStrategy::MeasureNow { basis } => {
                let b = match basis {
                    MeasureBasis::Computational => "computational",
                    MeasureBasis::Hadamard => "hadamard",
                    MeasureBasis::Random => "random",
                    MeasureBasis::Breidbart => "breidbart",
                };
                write!(f, "measure_now({b})")
            }
            AttackStrategy::BoundedStore { q } => write!(f, "bounded_store(q={q})"),
            AttackStrategy::NoisyStore { r, nu } => write!(f, "noisy_store(r={r}, nu={nu})"),
        }
    }
}

impl AttackStrategy {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            AttackStrategy::MeasureNow { .. } => Ok(()),
            AttackStrategy::BoundedStore { q } if q > n => {
                Err(Error::arg(format!("stored qubit count {q} exceeds n = {n}")))
            }
            AttackStrategy::BoundedStore { .. } => Ok(()),
            AttackStrategy::NoisyStore { r, nu } => {
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::arg(format!("r = {r} must lie in [0, 1]")));
                }
                if !(nu >= 0.0) || !nu.is_finite() {
                    return Err(Error::arg(format!("ν = {nu} must be finite and non-negative")));
                }
                Ok(())
            }
        }
    }

    fn stored(&self, n: usize) -> usize {
        match *self {
            AttackStrategy::MeasureNow { .. } => 0,
            AttackStrategy::BoundedStore { q } => q.min(n),
            AttackStrategy::NoisyStore { nu, .. } => ((nu * n as f64).floor() as usize).min(n),
        }
    }

    /// Exact per-bit guessing probability of this strategy on `n` qubits.
    pub fn per_bit_success(&self, n: usize) -> f64 {
        let k = self.stored(n) as f64;
        let n = n as f64;
        match *self {
            AttackStrategy::MeasureNow { basis: MeasureBasis::Breidbart } => BREIDBART_GUESS,
            AttackStrategy::MeasureNow { .. } => 0.75,
            AttackStrategy::BoundedStore { .. } => (k + (n - k) * 0.75) / n,
            AttackStrategy::NoisyStore { r, .. } => (k * (0.5 + 0.5 * r) + (n - k) * BREIDBART_GUESS) / n,
        }
    }

    /// Exact probability of guessing all `n` bits.
    pub fn whole_string_success(&self, n: usize) -> f64 {
        let k = self.stored(n) as i32;
        let rest = n as i32 - k;
        match *self {
            AttackStrategy::MeasureNow { .. } => self.per_bit_success(n).powi(n as i32),
            AttackStrategy::BoundedStore { .. } => 0.75f64.powi(rest),
            AttackStrategy::NoisyStore { r, .. } => (0.5 + 0.5 * r).powi(k) * BREIDBART_GUESS.powi(rest),
        }
    }
}

#[derive(Debug, Clone)]
enum Slot {
    Measured(bool),
    Stored,
    Erased,
}

/// A dishonest Bob following an [`AttackStrategy`]; he outputs a guess of
/// the whole string with `I = [n]`.
#[derive(Debug, Clone)]
pub struct StrategyBob {
    strategy: AttackStrategy,
    register: Option<Bb84Register>,
    slots: Vec<Slot>,
    guess: BitString,
}

fn bb84_direction(theta: bool) -> BlochDirection {
    if theta {
        BlochDirection::HADAMARD
    } else {
        BlochDirection::COMPUTATIONAL
    }
}

impl StrategyBob {
    pub fn new(strategy: AttackStrategy) -> Self {
        Self {
            strategy,
            register: None,
            slots: Vec::new(),
            guess: BitString::new(),
        }
    }

    /// Bob's guess of `x^n` after the protocol.
    pub fn guess(&self) -> &BitString {
        &self.guess
    }
}

impl WseBob for StrategyBob {
    fn receive(&mut self, register: &Bb84Register, rng: &mut dyn RngCore) {
        let n = register.len();
        let k = self.strategy.stored(n);
        self.slots = (0..n)
            .map(|i| {
                let dir = match self.strategy {
                    AttackStrategy::MeasureNow { basis } => match basis {
                        MeasureBasis::Computational => BlochDirection::COMPUTATIONAL,
                        MeasureBasis::Hadamard => BlochDirection::HADAMARD,
                        MeasureBasis::Random => bb84_direction(rng.gen()),
                        MeasureBasis::Breidbart => BlochDirection::BREIDBART,
                    },
                    AttackStrategy::BoundedStore { .. } if i < k => return Slot::Stored,
                    AttackStrategy::BoundedStore { .. } => bb84_direction(rng.gen()),
                    AttackStrategy::NoisyStore { r, .. } if i < k => {
                        return if rng.gen::<f64>() < r { Slot::Stored } else { Slot::Erased };
                    }
                    AttackStrategy::NoisyStore { .. } => BlochDirection::BREIDBART,
                };
                Slot::Measured(measure_qubit(register, i, dir, rng))
            })
            .collect();
        self.register = Some(register.clone());
    }

    fn finish(&mut self, theta: &BitString, rng: &mut dyn RngCore) -> (Vec<usize>, BitString) {
        let register = self.register.take().expect("receive precedes finish");
        self.guess = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, slot)| match slot {
                Slot::Measured(b) => *b,
                Slot::Stored => measure_qubit(&register, i, bb84_direction(theta.get(i)), rng),
                Slot::Erased => rng.gen(),
            })
            .collect();
        ((0..theta.len()).collect(), self.guess.clone())
    }
}

/// Two-sided Wilson score interval.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub strategy: String,
    pub metric: String,
    pub n: usize,
    /// Protocol runs.
    pub trials: u64,
    /// Bernoulli samples behind the estimate (runs, or runs × bits).
    pub samples: u64,
    pub successes: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: Option<f64>,
    pub bound_source: String,
    pub bound_vacuous: bool,
}

impl AttackReport {
    #[allow(clippy::too_many_arguments)]
    fn frequency(
        strategy: String,
        metric: &str,
        n: usize,
        trials: u64,
        samples: u64,
        successes: u64,
        bound: Option<f64>,
        bound_source: &str,
    ) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, samples, Z_99);
        Self {
            strategy,
            metric: metric.into(),
            n,
            trials,
            samples,
            successes,
            estimate: successes as f64 / samples as f64,
            ci_low,
            ci_high,
            bound,
            bound_source: bound_source.into(),
            bound_vacuous: bound.is_some_and(|b| !(b < 1.0)),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Independent generator for trial `index` of a campaign seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn trial_pair(seed: u64, index: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut base = trial_rng(seed, index);
    let a = ChaCha8Rng::from_rng(&mut base).expect("ChaCha seeding cannot fail");
    let b = ChaCha8Rng::from_rng(&mut base).expect("ChaCha seeding cannot fail");
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WseAttackReport {
    pub per_bit: AttackReport,
    pub whole_string: AttackReport,
}

/// Dishonest Bob in weak string erasure: how well does he guess `x^n`?
pub fn run_wse_attack(strategy: AttackStrategy, n: usize, trials: u64, seed: u64) -> Result<WseAttackReport> {
    if trials == 0 || n == 0 {
        return Err(Error::arg("n and trials must be at least 1"));
    }
    strategy.validate(n)?;
    let (bits, whole) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (mut a, mut b) = trial_pair(seed, t);
            let mut bob = StrategyBob::new(strategy);
            let out = wse_run_with(n, &mut Transport::new(), &mut a, &mut bob, &mut b).expect("n validated");
            let wrong = out.x.hamming_distance(bob.guess()) as u64;
            (n as u64 - wrong, (wrong == 0) as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let name = strategy.to_string();
    Ok(WseAttackReport {
        per_bit: AttackReport::frequency(
            name.clone(),
            "per_bit_guess",
            n,
            trials,
            trials * n as u64,
            bits,
            Some(strategy.per_bit_success(n)),
            "exact per-strategy guessing probability",
        ),
        whole_string: AttackReport::frequency(
            name,
            "whole_string_guess",
            n,
            trials,
            trials,
            whole,
            Some(strategy.whole_string_success(n)),
            "exact per-strategy guessing probability",
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub report: AttackReport,
    /// `2^{−d/2}`.
    pub envelope: f64,
    /// Whether the opening was forced to carry the committed syndrome.
    pub syndrome_forced: bool,
}

/// Cheating committer: opens `x ⊕ e` with `|e| = dist`. When the code has
/// codewords of that weight, `e` is a uniformly chosen one, so the syndrome
/// matches and only the substring check can catch her.
pub fn run_binding_attack(code: &BinaryCode, dist: usize, trials: u64, seed: u64) -> Result<BindingReport> {
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if !code.is_toy() {
        return Err(Error::infeasible(
            "toy-code size (n ≤ 24)",
            format!("syndrome forcing needs exhaustive codeword search, n = {}", code.n()),
        ));
    }
    let n = code.n();
    if dist > n {
        return Err(Error::arg(format!("distance {dist} exceeds n = {n}")));
    }
    let pool: Vec<BitString> = code.codewords()?.into_iter().filter(|c| c.weight() == dist).collect();
    let forced = !pool.is_empty();
    let accepted: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (mut a, mut b) = trial_pair(seed, t);
            let mut tr = Transport::new();
            let wse = wse_run(n, &mut tr, &mut a, &mut b).expect("n ≥ 1");
            let rec = commit_run(&wse, code, 1, &mut tr, &mut a).expect("consistent code");
            let e = if forced {
                pool[a.gen_range(0..pool.len())].clone()
            } else {
                let mut e = BitString::zeros(n);
                for i in rand::seq::index::sample(&mut a, n, dist) {
                    e.set(i, true);
                }
                e
            };
            let claimed = rec.alice.x.xor(&e).expect("equal lengths");
            open_check(&rec.bob, code, &claimed).expect("length n").accepted() as u64
        })
        .sum();
    let bound = if forced || dist == 0 { 0.5f64.powi(dist as i32) } else { 0.0 };
    Ok(BindingReport {
        report: AttackReport::frequency(
            format!("binding(dist={dist})"),
            "accept",
            n,
            trials,
            trials,
            accepted,
            Some(bound),
            if forced || dist == 0 {
                "each differing position avoids I with probability 1/2"
            } else {
                "no codeword of this weight; syndrome check always fails"
            },
        ),
        envelope: 0.5f64.powf(code.dmin() as f64 / 2.0),
        syndrome_forced: forced || dist == 0,
    })
}

/// What the hiding attack tries to learn.
#[derive(Debug, Clone)]
pub enum HidingTarget {
    /// First bit of the commitment `c = Ext(x, r)` before opening.
    Commit { code: BinaryCode, ell: usize, delta: f64 },
    /// First bit of `S_{1−C}` after FROT.
    Frot { params: OtParams, delta: f64 },
}

/// Bob guesses a hidden bit from his guess of `x^n`; reports the advantage
/// `2p − 1` over blind guessing.
pub fn run_hiding_attack(target: &HidingTarget, strategy: AttackStrategy, trials: u64, seed: u64) -> Result<AttackReport> {
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    let (n, bound, source) = match target {
        HidingTarget::Commit { code, ell, delta } => {
            if *ell == 0 || *ell > code.n() {
                return Err(Error::arg(format!("ℓ = {ell} must lie in 1..={}", code.n())));
            }
            (code.n(), 2.0 * wse_error(*delta, code.n()), "commitment hiding error 2ε(δ,n)")
        }
        HidingTarget::Frot { params, delta } => {
            let b = if params.covered { params.error } else { 2.0 * wse_error(*delta, params.n).max(1.0) };
            (params.n, b, "oblivious-transfer error 41·2^{−λ²n/(512ω²β)} + 2ε")
        }
    };
    strategy.validate(n)?;
    let run_one = |t: u64| -> Result<bool> {
        let (mut a, mut b) = trial_pair(seed, t);
        let mut tr = Transport::new();
        let mut bob = StrategyBob::new(strategy);
        match target {
            HidingTarget::Commit { code, ell, .. } => {
                let wse = wse_run_with(n, &mut tr, &mut a, &mut bob, &mut b)?;
                let rec = commit_run(&wse, code, *ell, &mut tr, &mut a)?;
                let guess = ext(bob.guess(), &rec.bob.seed)?;
                Ok(guess.get(0) == rec.alice.c.get(0))
            }
            HidingTarget::Frot { params, .. } => {
                let out = frot_run_with(params, &mut tr, &mut a, &mut bob, &mut b)?;
                Ok(guess_other_string(&out, params, bob.guess())?.get(0) == other_string(&out).get(0))
            }
        }
    };
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| run_one(t).map(|h| h as u64))
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let p = AttackReport::frequency(strategy.to_string(), "advantage", n, trials, trials, hits, Some(bound), source);
    Ok(AttackReport {
        estimate: 2.0 * p.estimate - 1.0,
        ci_low: 2.0 * p.ci_low - 1.0,
        ci_high: 2.0 * p.ci_high - 1.0,
        ..p
    })
}

fn other_string(out: &FrotOutcome) -> &BitString {
    if out.c {
        &out.s0
    } else {
        &out.s1
    }
}

fn guess_other_string(out: &FrotOutcome, params: &OtParams, x_guess: &BitString) -> Result<BitString> {
    let enc = crate::ihash::SubsetEncoding::new(params.m)?;
    let (w_other, seed) = if out.c { (&out.w0, &out.r0) } else { (&out.w1, &out.r1) };
    let mut permuted = BitString::zeros(params.n);
    for (src, &dest) in out.pi.iter().enumerate() {
        permuted.set(dest, x_guess.get(src));
    }
    let cells: Vec<usize> = enc
        .enc(w_other)?
        .iter()
        .flat_map(|&j| (j - 1) * params.beta..j * params.beta)
        .collect();
    ext(&permuted.select(&cells), seed)
}

/// `H_min(X|Q) = −log P_guess(X|Q)`.
pub fn min_entropy_exact(state: &CcState) -> f64 {
    -guess_prob_classical(state).log2()
}

/// `H_∞(X) = −log max_x P(x)`.
pub fn min_entropy_marginal(p: &[f64]) -> f64 {
    -p.iter().copied().fold(0.0, f64::max).log2()
}

/// Classical channel with row-stochastic transition matrix `F(y|q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    nin: usize,
    nout: usize,
    f: Vec<f64>,
}

impl ClassicalChannel {
    pub fn new(nin: usize, nout: usize, f: Vec<f64>) -> Result<Self> {
        if nin == 0 || nout == 0 || f.len() != nin * nout {
            return Err(Error::arg("transition matrix has the wrong shape"));
        }
        for q in 0..nin {
            let row = &f[q * nout..(q + 1) * nout];
            if row.iter().any(|&v| !(v >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::arg(format!("row {q} is not a probability distribution")));
            }
        }
        Ok(Self { nin, nout, f })
    }

    pub fn identity(n: usize) -> Self {
        let f = (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect();
        Self { nin: n, nout: n, f }
    }

    pub fn constant(nin: usize) -> Self {
        Self {
            nin,
            nout: 1,
            f: vec![1.0; nin],
        }
    }

    pub fn random<R: Rng + ?Sized>(nin: usize, nout: usize, rng: &mut R) -> Self {
        let mut f = Vec::with_capacity(nin * nout);
        for _ in 0..nin {
            let row: Vec<f64> = (0..nout).map(|_| rng.gen::<f64>().powi(3)).collect();
            let s: f64 = row.iter().sum();
            f.extend(row.iter().map(|v| v / s));
        }
        Self { nin, nout, f }
    }

    pub fn nin(&self) -> usize {
        self.nin
    }

    pub fn nout(&self) -> usize {
        self.nout
    }

    pub fn prob(&self, y: usize, q: usize) -> f64 {
        self.f[q * self.nout + y]
    }

    /// Joint `P(x, y)` after sending the `Q` part of `state` through the channel.
    pub fn apply(&self, state: &CcState) -> Result<CcState> {
        if state.nq() != self.nin {
            return Err(Error::arg("channel input alphabet does not match Q"));
        }
        let mut p = vec![0.0; state.nx() * self.nout];
        for x in 0..state.nx() {
            for q in 0..self.nin {
                let pxq = state.p(x, q);
                for y in 0..self.nout {
                    p[x * self.nout + y] += pxq * self.prob(y, q);
                }
            }
        }
        CcState::from_weights(state.nx(), self.nout, p)
    }

    /// Best probability of sending a uniform `k`-bit message:
    /// `2^{−k} max_{|A| ≤ 2^k} Σ_y max_{a∈A} F(y|a)`. Equals 1 for `k ≤ 0`.
    pub fn p_succ(&self, k: i64) -> f64 {
        if k <= 0 {
            return 1.0;
        }
        if k >= 62 || (1u64 << k) >= self.nin as u64 {
            let total: f64 = (0..self.nout)
                .map(|y| (0..self.nin).map(|q| self.prob(y, q)).fold(0.0, f64::max))
                .sum();
            return (total * (-(k as f64)).exp2()).min(1.0);
        }
        let size = 1usize << k;
        let mut best = 0.0f64;
        for mask in 0u64..(1u64 << self.nin) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let total: f64 = (0..self.nout)
                .map(|y| {
                    (0..self.nin)
                        .filter(|&q| mask >> q & 1 == 1)
                        .map(|q| self.prob(y, q))
                        .fold(0.0, f64::max)
                })
                .sum();
            best = best.max(total);
        }
        best / size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub slack: f64,
}

const LEMMA_TOL: f64 = 1e-9;

fn lemma_check(lhs: f64, rhs: f64) -> LemmaCheck {
    LemmaCheck {
        holds: lhs >= rhs - LEMMA_TOL,
        lhs,
        rhs,
        slack: lhs - rhs,
    }
}

fn check_size(nx: usize, nq: usize, side: usize) -> Result<()> {
    let size = nx.saturating_mul(nq).saturating_mul(side);
    if size > ORACLE_MAX_SIZE {
        return Err(Error::infeasible("|X|·|Q| ≤ 2^20", format!("instance size {size}")));
    }
    if nq > 20 {
        return Err(Error::infeasible("|Q| ≤ 20 for exhaustive encoder search", format!("|Q| = {nq}")));
    }
    Ok(())
}

/// `H_min(X|F(Q)) ≥ −log P^F_succ(⌊H_∞(X)⌋)`, both sides exact.
pub fn check_entropy_lemma_22(state: &CcState, channel: &ClassicalChannel) -> Result<LemmaCheck> {
    check_size(state.nx(), state.nq(), 1)?;
    let lhs = min_entropy_exact(&channel.apply(state)?);
    let k = (min_entropy_marginal(&state.marginal_x()) + LEMMA_TOL).floor() as i64;
    Ok(lemma_check(lhs, -channel.p_succ(k).log2()))
}

/// Classical `P(x, t, q)`, stored `t`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CctState {
    nx: usize,
    nt: usize,
    nq: usize,
    p: Vec<f64>,
}

impl CctState {
    pub fn from_weights(nx: usize, nt: usize, nq: usize, w: Vec<f64>) -> Result<Self> {
        if nx * nt * nq == 0 || w.len() != nx * nt * nq || w.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::arg("weights must be non-negative with shape |X|·|T|·|Q|"));
        }
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::arg("weights must not all vanish"));
        }
        Ok(Self {
            nx,
            nt,
            nq,
            p: w.into_iter().map(|v| v / s).collect(),
        })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn p(&self, x: usize, t: usize, q: usize) -> f64 {
        self.p[(t * self.nx + x) * self.nq + q]
    }

    pub fn p_t(&self, t: usize) -> f64 {
        (0..self.nx).flat_map(|x| (0..self.nq).map(move |q| (x, q))).map(|(x, q)| self.p(x, t, q)).sum()
    }

    /// `P(x, q | t)`; `None` when `P(t) = 0`.
    pub fn conditional(&self, t: usize) -> Option<CcState> {
        let pt = self.p_t(t);
        if !(pt > 0.0) {
            return None;
        }
        let w = (0..self.nx)
            .flat_map(|x| (0..self.nq).map(move |q| (x, q)))
            .map(|(x, q)| self.p(x, t, q))
            .collect();
        CcState::from_weights(self.nx, self.nq, w).ok()
    }

    /// Marginal over `Q`: `P(x, t)` as a cc-state with `T` as side information.
    pub fn xt(&self) -> CcState {
        let mut w = vec![0.0; self.nx * self.nt];
        for x in 0..self.nx {
            for t in 0..self.nt {
                w[x * self.nt + t] = (0..self.nq).map(|q| self.p(x, t, q)).sum();
            }
        }
        CcState::from_weights(self.nx, self.nt, w).expect("normalized")
    }

    /// Joint side information `(Q, T)` flattened to one register.
    pub fn x_qt(&self) -> CcState {
        let mut w = vec![0.0; self.nx * self.nt * self.nq];
        for x in 0..self.nx {
            for t in 0..self.nt {
                for q in 0..self.nq {
                    w[x * self.nt * self.nq + t * self.nq + q] = self.p(x, t, q);
                }
            }
        }
        CcState::from_weights(self.nx, self.nt * self.nq, w).expect("normalized")
    }
}

/// `H_min^{ε′}(X|T F(Q)) ≥ −log P^F_succ(⌊H_min(X|T) − log 1/ε′⌋)` at `ε = 0`.
///
/// The left side is witnessed by the state conditioned on the good set of
/// `t`, which lies within `ε′` of the actual state.
pub fn check_entropy_lemma_23(state: &CctState, channel: &ClassicalChannel, eps_prime: f64) -> Result<LemmaCheck> {
    check_size(state.nx, state.nq, state.nt)?;
    if !(eps_prime > 0.0 && eps_prime <= 1.0) {
        return Err(Error::arg(format!("ε′ = {eps_prime} must lie in (0, 1]")));
    }
    if channel.nin != state.nq {
        return Err(Error::arg("channel input alphabet does not match Q"));
    }
    let h_xt = min_entropy_exact(&state.xt());
    let k = (h_xt - (1.0 / eps_prime).log2() + LEMMA_TOL).floor() as i64;
    let mut weight = 0.0;
    let mut guess = 0.0;
    for t in 0..state.nt {
        let Some(cond) = state.conditional(t) else { continue };
        if min_entropy_marginal(&cond.marginal_x()) + LEMMA_TOL < k as f64 {
            continue;
        }
        let pt = state.p_t(t);
        weight += pt;
        guess += pt * guess_prob_classical(&channel.apply(&cond)?);
    }
    let lhs = -(guess / weight).log2();
    Ok(lemma_check(lhs, -channel.p_succ(k).log2()))
}

/// Both sides of `H_min(X|QT) = −log E_t[2^{−H_min(X|Q,T=t)}]`.
pub fn conditioning_identity(state: &CctState) -> (f64, f64) {
    let lhs = min_entropy_exact(&state.x_qt());
    let avg: f64 = (0..state.nt)
        .filter_map(|t| state.conditional(t).map(|c| state.p_t(t) * guess_prob_classical(&c)))
        .sum();
    (lhs, -avg.log2())
}

/// Probability of guessing `x` from a measurement along `dir` and the basis
/// `θ`, for uniform `x, θ`, computed from the projectors.
pub fn guess_after_measurement(dir: BlochDirection) -> f64 {
    let proj = [dir.projector(false), dir.projector(true)];
    let mut total = 0.0;
    for theta in [false, true] {
        for p in &proj {
            let best = [false, true]
                .iter()
                .map(|&x| p.expectation(&DensityOp::bb84(x, theta)))
                .fold(0.0, f64::max);
            total += 0.25 * best;
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyScan {
    pub max_guess: f64,
    pub polar: f64,
    pub azimuth: f64,
}

/// Maximum of [`guess_after_measurement`] over all projective qubit
/// measurements: a `resolution × resolution` grid on the sphere followed by
/// a shrinking-step local search.
pub fn uncertainty_scan(resolution: usize) -> Result<UncertaintyScan> {
    use std::f64::consts::PI;
    if resolution < 100 {
        return Err(Error::arg("resolution must be at least 100"));
    }
    let f = |polar: f64, azimuth: f64| guess_after_measurement(BlochDirection { polar, azimuth });
    let (mut best, mut bp, mut ba) = (f64::MIN, 0.0, 0.0);
    for i in 0..=resolution {
        let polar = PI * i as f64 / resolution as f64;
        for j in 0..resolution {
            let azimuth = 2.0 * PI * j as f64 / resolution as f64;
            let v = f(polar, azimuth);
            if v > best {
                (best, bp, ba) = (v, polar, azimuth);
            }
        }
    }
    let mut step = PI / resolution as f64;
    while step > 1e-12 {
        let mut moved = false;
        for (dp, da) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (p, a) = ((bp + dp).clamp(0.0, PI), ba + da);
            let v = f(p, a);
            if v > best {
                (best, bp, ba, moved) = (v, p, a, true);
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    Ok(UncertaintyScan {
        max_guess: best,
        polar: bp,
        azimuth: ba.rem_euclid(2.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{hamming_7_4, rs_shortened, toy_codes};

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!(lo < 0.5 && hi > 0.5);
        let (lo2, hi2) = wilson_interval(5000, 10_000, Z_99);
        assert!(((hi - lo) / (hi2 - lo2) - 10.0).abs() < 0.5);
        let (lo, hi) = wilson_interval(0, 100, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn measure_now_estimates() {
        let r = run_wse_attack(AttackStrategy::MeasureNow { basis: MeasureBasis::Breidbart }, 100, 2000, 1).unwrap();
        assert!((r.per_bit.estimate - BREIDBART_GUESS).abs() < 0.005);
        assert!(r.per_bit.contains(BREIDBART_GUESS));
        let r = run_wse_attack(AttackStrategy::MeasureNow { basis: MeasureBasis::Random }, 100, 2000, 2).unwrap();
        assert!(r.per_bit.contains(0.75));
        let r = run_wse_attack(AttackStrategy::MeasureNow { basis: MeasureBasis::Computational }, 100, 2000, 3).unwrap();
        assert!(r.per_bit.contains(0.75));
    }

    #[test]
    fn perfect_storage_guesses_everything() {
        let r = run_wse_attack(AttackStrategy::NoisyStore { r: 1.0, nu: 1.0 }, 64, 200, 4).unwrap();
        assert_eq!(r.whole_string.estimate, 1.0);
        let r = run_wse_attack(AttackStrategy::BoundedStore { q: 64 }, 64, 200, 4).unwrap();
        assert_eq!(r.whole_string.estimate, 1.0);
        assert!(run_wse_attack(AttackStrategy::BoundedStore { q: 65 }, 64, 1, 4).is_err());
        assert!(run_wse_attack(AttackStrategy::NoisyStore { r: 1.5, nu: 1.0 }, 64, 1, 4).is_err());
    }

    #[test]
    fn noisy_store_matches_erasure_picture() {
        for r in [0.0, 0.3, 0.7] {
            let s = AttackStrategy::NoisyStore { r, nu: 0.5 };
            let rep = run_wse_attack(s, 100, 2000, 5).unwrap();
            assert!(rep.per_bit.contains(s.per_bit_success(100)), "r = {r}");
        }
    }

    #[test]
    fn attacks_replay() {
        let s = AttackStrategy::MeasureNow { basis: MeasureBasis::Random };
        assert_eq!(run_wse_attack(s, 10, 100, 9).unwrap(), run_wse_attack(s, 10, 100, 9).unwrap());
    }

    #[test]
    fn binding_examples() {
        let code = rs_shortened(3, 2, 7).unwrap();
        let r = run_binding_attack(&code, 0, 500, 1).unwrap();
        assert_eq!(r.report.estimate, 1.0);
        let r = run_binding_attack(&code, 2, 20_000, 2).unwrap();
        assert!(r.syndrome_forced);
        assert!(r.report.contains(0.25), "{:?}", r.report);
        // weight-1 errors break the syndrome of a distance-3 code
        let r = run_binding_attack(&hamming_7_4(), 1, 500, 3).unwrap();
        assert!(!r.syndrome_forced);
        assert_eq!(r.report.successes, 0);
        assert!(run_binding_attack(&crate::coding::rs_build(5, 3).unwrap(), 2, 1, 1)
            .unwrap_err()
            .is_feasibility());
    }

    #[test]
    fn hiding_examples() {
        let code = rs_shortened(3, 3, 7).unwrap();
        let target = HidingTarget::Commit { code, ell: 4, delta: 0.1 };
        let r = run_hiding_attack(&target, AttackStrategy::NoisyStore { r: 0.0, nu: 1.0 }, 4000, 1).unwrap();
        assert!(r.ci_low < 0.0 && r.ci_high > 0.0, "{r:?}");
        assert!(r.bound_vacuous);
        let r = run_hiding_attack(&target, AttackStrategy::NoisyStore { r: 1.0, nu: 1.0 }, 500, 1).unwrap();
        assert_eq!(r.estimate, 1.0);

        let params = crate::secparams::ot_params_toy(32, 4, 4).unwrap();
        let target = HidingTarget::Frot { params, delta: 0.1 };
        let r = run_hiding_attack(&target, AttackStrategy::NoisyStore { r: 1.0, nu: 1.0 }, 300, 1).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(r.bound_vacuous);
    }

    #[test]
    fn min_entropy_examples() {
        let uniform = CcState::from_weights(4, 3, vec![1.0; 12]).unwrap();
        assert!((min_entropy_exact(&uniform) - 2.0).abs() < 1e-12);
        let diag = CcState::from_weights(4, 4, (0..16).map(|i| (i % 5 == 0) as u8 as f64).collect()).unwrap();
        assert!(min_entropy_exact(&diag).abs() < 1e-12);
        // P(x, q) with guessing probability 0.8
        let s = CcState::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        assert!((min_entropy_exact(&s) + 0.8f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn channel_bound_examples() {
        let s = CcState::from_weights(4, 4, (0..16).map(|i| (i % 5 == 0) as u8 as f64).collect()).unwrap();
        let c = check_entropy_lemma_22(&s, &ClassicalChannel::constant(4)).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12 && c.holds);
        let c = check_entropy_lemma_22(&s, &ClassicalChannel::identity(4)).unwrap();
        assert!(c.holds);
        assert!(c.lhs.abs() < 1e-12 && c.rhs.abs() < 1e-12);
    }

    #[test]
    fn conditioned_bound_reduces_to_channel_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let (nx, nq) = (rng.gen_range(2..6), rng.gen_range(1..5));
            let w: Vec<f64> = (0..nx * nq).map(|_| rng.gen::<f64>()).collect();
            let ch = ClassicalChannel::random(nq, rng.gen_range(1..4), &mut rng);
            let cc = CcState::from_weights(nx, nq, w.clone()).unwrap();
            let cct = CctState::from_weights(nx, 1, nq, w).unwrap();
            let a = check_entropy_lemma_22(&cc, &ch).unwrap();
            let b = check_entropy_lemma_23(&cct, &ch, 1.0).unwrap();
            assert!((a.lhs - b.lhs).abs() < 1e-12 && (a.rhs - b.rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_instances_are_infeasible() {
        let wide = CcState::new(1 << 17, 16, vec![1.0 / f64::from(1 << 21); 1 << 21]).unwrap();
        assert!(check_entropy_lemma_22(&wide, &ClassicalChannel::constant(16)).unwrap_err().is_feasibility());
        let tall = CcState::new(2, 21, vec![1.0 / 42.0; 42]).unwrap();
        assert!(check_entropy_lemma_22(&tall, &ClassicalChannel::constant(21)).unwrap_err().is_feasibility());
        let st = CctState::from_weights(2, 1, 21, vec![1.0; 42]).unwrap();
        assert!(check_entropy_lemma_23(&st, &ClassicalChannel::constant(21), 0.5).unwrap_err().is_feasibility());
        let small = CctState::from_weights(2, 1, 2, vec![1.0; 4]).unwrap();
        assert!(!check_entropy_lemma_23(&small, &ClassicalChannel::constant(2), 0.0).unwrap_err().is_feasibility());
    }

    #[test]
    fn p_succ_identity_and_constant() {
        let id = ClassicalChannel::identity(4);
        assert_eq!(id.p_succ(1), 1.0);
        assert_eq!(id.p_succ(2), 1.0);
        assert!((id.p_succ(3) - 0.5).abs() < 1e-15);
        let c = ClassicalChannel::constant(4);
        assert!((c.p_succ(2) - 0.25).abs() < 1e-15);
        assert_eq!(c.p_succ(0), 1.0);
    }

    #[test]
    fn uncertainty_examples() {
        assert!((guess_after_measurement(BlochDirection::BREIDBART) - BREIDBART_GUESS).abs() < 1e-12);
        assert!((guess_after_measurement(BlochDirection::COMPUTATIONAL) - 0.75).abs() < 1e-12);
        let scan = uncertainty_scan(100).unwrap();
        assert!(scan.max_guess <= BREIDBART_GUESS + 1e-4);
        assert!((scan.max_guess - BREIDBART_GUESS).abs() < 1e-9);
        // Closed form ½ + (|n_z| + |n_x|)/4 as an independent check.
        let n = BlochDirection { polar: scan.polar, azimuth: scan.azimuth }.vector();
        assert!((0.5 + (n[2].abs() + n[0].abs()) / 4.0 - scan.max_guess).abs() < 1e-9);
        assert!(uncertainty_scan(99).is_err());
    }

    #[test]
    fn toy_codes_usable_for_binding() {
        for code in toy_codes() {
            assert!(run_binding_attack(&code, code.dmin(), 10, 1).is_ok());
        }
    }
}
