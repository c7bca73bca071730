//! Subset encoding and interactive hashing.
//!
//! Interactive hashing here is the linear-functional protocol: in each of
//! `t − 1` rounds Alice sends a random query `q_i` independent of the earlier
//! ones and Bob replies with `⟨q_i, w⟩`. The constraints leave exactly two
//! candidates, which both sides output in lexicographic order.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Injective map from `t`-bit strings to `m/4`-subsets of `[m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetEncoding {
    m: usize,
    s: usize,
    t: usize,
    total: BigUint,
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

impl SubsetEncoding {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m % 4 != 0 {
            return Err(Error::arg(format!("ground set size {m} must be a positive multiple of 4")));
        }
        let s = m / 4;
        let total = binomial(m, s);
        let t = total.bits() as usize - 1;
        Ok(Self { m, s, t, total })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `C(m, m/4)`.
    pub fn subset_count(&self) -> &BigUint {
        &self.total
    }

    /// Colexicographic unranking; `w` is read as an integer, most significant
    /// bit first. Returns sorted 1-based elements.
    pub fn enc(&self, w: &BitString) -> Result<Vec<usize>> {
        if w.len() != self.t {
            return Err(Error::arg(format!("encoding input has {} bits, expected {}", w.len(), self.t)));
        }
        let mut r = w.iter().fold(BigUint::zero(), |acc, b| (acc << 1u32) + (b as u32));
        let mut out = Vec::with_capacity(self.s);
        let mut c = self.m - 1;
        let mut b = binomial(self.m - 1, self.s);
        for i in (1..=self.s).rev() {
            // b = C(c, i)
            while b > r {
                b = b * (c - i) / c;
                c -= 1;
            }
            out.push(c);
            if b.is_zero() {
                // c = i − 1: the remaining elements are forced
                out.extend((0..i - 1).rev());
                break;
            }
            r -= &b;
            if i > 1 {
                b = b * i / c;
                c -= 1;
            }
        }
        out.reverse();
        Ok(out.into_iter().map(|c| c + 1).collect())
    }

    /// Colexicographic rank of a subset, or `None` if it lies outside the image.
    pub fn enc_inverse(&self, subset: &[usize]) -> Result<Option<BitString>> {
        let rank = self.rank(subset)?;
        if rank.bits() as usize > self.t {
            return Ok(None);
        }
        Ok(Some(
            (0..self.t).map(|i| rank.bit((self.t - 1 - i) as u64)).collect(),
        ))
    }

    /// `Σ C(c_i, i)` over the sorted 0-based elements.
    pub fn rank(&self, subset: &[usize]) -> Result<BigUint> {
        if subset.len() != self.s {
            return Err(Error::arg(format!("subset has {} elements, expected {}", subset.len(), self.s)));
        }
        let mut sorted: Vec<usize> = subset.to_vec();
        sorted.sort_unstable();
        if sorted[0] == 0 || sorted[self.s - 1] > self.m || sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::arg("subset elements must be distinct and lie in 1..=m"));
        }
        let mut rank = BigUint::zero();
        // Walk (c, k) with val = C(c, k), c ≥ k.
        let (mut c, mut k, mut val) = (0usize, 0usize, BigUint::one());
        for (idx, &e) in sorted.iter().enumerate() {
            let i = idx + 1;
            let ci = e - 1;
            if ci < i {
                continue;
            }
            while k < i {
                val = val * (c + 1) / (k + 1);
                c += 1;
                k += 1;
            }
            while c < ci {
                val = val * (c + 1) / (c + 1 - k);
                c += 1;
            }
            rank += &val;
        }
        Ok(rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IhRole {
    Alice,
    Bob,
}

/// One interactive-hashing message: a query from Alice or a one-bit answer
/// from Bob, tagged with its round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IhMessage {
    pub round: u16,
    pub bits: BitString,
}

impl IhMessage {
    /// `round: u16 LE`, `len: u32 LE`, then the packed bits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + self.bits.len().div_ceil(8));
        out.extend_from_slice(&self.round.to_le_bytes());
        out.extend_from_slice(&(self.bits.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.bits.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 6 {
            return Err(Error::Format("interactive-hashing message shorter than its header".into()));
        }
        let round = u16::from_le_bytes([bytes[0], bytes[1]]);
        let len = u32::from_le_bytes([bytes[2], bytes[3], bytes[4], bytes[5]]) as usize;
        let bits = BitString::from_bytes(&bytes[6..], len)?;
        Ok(Self { round, bits })
    }
}

/// Incrementally reduced GF(2) system `⟨q_i, x⟩ = b_i`.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    width: usize,
    /// (pivot, reduced row, reduced rhs)
    rows: Vec<(usize, BitString, bool)>,
}

impl LinearSystem {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the affine solution space.
    pub fn solution_dim(&self) -> usize {
        self.width - self.rows.len()
    }

    fn reduce(&self, q: &BitString, b: bool) -> (BitString, bool) {
        let mut v = q.clone();
        let mut rhs = b;
        for (p, row, rb) in &self.rows {
            if v.get(*p) {
                v = v.xor(row).expect("equal widths");
                rhs ^= rb;
            }
        }
        (v, rhs)
    }

    pub fn is_independent(&self, q: &BitString) -> bool {
        q.len() == self.width && self.reduce(q, false).0.weight() > 0
    }

    /// Adds a constraint; returns false (and leaves the system unchanged) if
    /// `q` is dependent on the existing rows.
    pub fn push(&mut self, q: &BitString, b: bool) -> bool {
        let (v, rhs) = self.reduce(q, b);
        let pivot = v.iter().position(|x| x);
        match pivot {
            Some(p) => {
                self.rows.push((p, v, rhs));
                true
            }
            None => false,
        }
    }

    /// Both solutions when exactly one free variable remains, sorted.
    pub fn two_solutions(&self) -> Option<(BitString, BitString)> {
        if self.solution_dim() != 1 {
            return None;
        }
        let mut is_pivot = vec![false; self.width];
        for (p, _, _) in &self.rows {
            is_pivot[*p] = true;
        }
        let free = is_pivot.iter().position(|&x| !x)?;
        let solve = |fv: bool| {
            let mut x = BitString::zeros(self.width);
            x.set(free, fv);
            // Row i vanishes on earlier pivots, so back-substitution runs in reverse.
            for (p, row, rhs) in self.rows.iter().rev() {
                let mut acc = *rhs;
                for j in 0..self.width {
                    if j != *p && row.get(j) {
                        acc ^= x.get(j);
                    }
                }
                x.set(*p, acc);
            }
            x
        };
        let (a, b) = (solve(false), solve(true));
        Some(if a.to_string() < b.to_string() { (a, b) } else { (b, a) })
    }
}

/// How a Bob session chooses answers.
#[derive(Debug, Clone)]
pub enum BobBehaviour {
    /// Answers `⟨q, w⟩` for his input `w`.
    Honest(BitString),
    /// Answers so as to keep as many strings of a target set consistent as
    /// possible (ties answer 0).
    Greedy(Vec<BitString>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IhStep {
    Send(IhMessage),
    Done(BitString, BitString),
}

/// One party's interactive-hashing state machine.
#[derive(Debug, Clone)]
pub struct IhSession {
    role: IhRole,
    t: usize,
    round: usize,
    system: LinearSystem,
    pending: Option<BitString>,
    bob: Option<BobBehaviour>,
    output: Option<(BitString, BitString)>,
    defaults_used: usize,
}

impl IhSession {
    pub fn alice(t: usize) -> Result<Self> {
        Self::build(IhRole::Alice, t, None)
    }

    pub fn bob(w: BitString) -> Result<Self> {
        let t = w.len();
        Self::build(IhRole::Bob, t, Some(BobBehaviour::Honest(w)))
    }

    pub fn greedy_bob(t: usize, target: Vec<BitString>) -> Result<Self> {
        if target.iter().any(|s| s.len() != t) {
            return Err(Error::arg("target strings must have length t"));
        }
        Self::build(IhRole::Bob, t, Some(BobBehaviour::Greedy(target)))
    }

    fn build(role: IhRole, t: usize, bob: Option<BobBehaviour>) -> Result<Self> {
        if t == 0 || t > u16::MAX as usize {
            return Err(Error::arg(format!("interactive hashing needs 1 ≤ t ≤ {}", u16::MAX)));
        }
        let mut s = Self {
            role,
            t,
            round: 0,
            system: LinearSystem::new(t),
            pending: None,
            bob,
            output: None,
            defaults_used: 0,
        };
        if t == 1 {
            s.finish();
        }
        Ok(s)
    }

    pub fn role(&self) -> IhRole {
        self.role
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Rounds completed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn rounds_total(&self) -> usize {
        self.t - 1
    }

    pub fn is_finished(&self) -> bool {
        self.output.is_some()
    }

    pub fn output(&self) -> Option<&(BitString, BitString)> {
        self.output.as_ref()
    }

    pub fn solution_dim(&self) -> usize {
        self.system.solution_dim()
    }

    /// Number of incoming messages replaced by a default.
    pub fn defaults_used(&self) -> usize {
        self.defaults_used
    }

    /// Index `D` of Bob's input among the outputs, for an honest Bob.
    pub fn choice_index(&self) -> Option<bool> {
        match (&self.bob, &self.output) {
            (Some(BobBehaviour::Honest(w)), Some((w0, w1))) => {
                if w == w0 {
                    Some(false)
                } else if w == w1 {
                    Some(true)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn finish(&mut self) {
        self.output = self.system.two_solutions();
    }

    /// Advances the session. Alice starts with `None`; every later call
    /// takes the other party's message (`None` if it was lost).
    pub fn step<R: Rng + ?Sized>(&mut self, incoming: Option<&IhMessage>, rng: &mut R) -> Result<IhStep> {
        if let Some((a, b)) = &self.output {
            return Ok(IhStep::Done(a.clone(), b.clone()));
        }
        match self.role {
            IhRole::Alice => self.alice_step(incoming, rng),
            IhRole::Bob => self.bob_step(incoming),
        }
    }

    fn alice_step<R: Rng + ?Sized>(&mut self, incoming: Option<&IhMessage>, rng: &mut R) -> Result<IhStep> {
        if let Some(q) = self.pending.take() {
            let b = match incoming {
                Some(msg) if msg.round as usize == self.round && msg.bits.len() == 1 => msg.bits.get(0),
                _ => {
                    self.defaults_used += 1;
                    false
                }
            };
            self.system.push(&q, b);
            self.round += 1;
            debug_assert_eq!(self.system.solution_dim(), self.t - self.round);
            if self.round == self.t - 1 {
                self.finish();
                let (a, b) = self.output.clone().expect("one free variable left");
                return Ok(IhStep::Done(a, b));
            }
        }
        let q = loop {
            let q = BitString::random(self.t, rng);
            if self.system.is_independent(&q) {
                break q;
            }
        };
        self.pending = Some(q.clone());
        Ok(IhStep::Send(IhMessage {
            round: self.round as u16,
            bits: q,
        }))
    }

    fn bob_step(&mut self, incoming: Option<&IhMessage>) -> Result<IhStep> {
        let q = match incoming {
            Some(msg) if msg.round as usize == self.round && self.system.is_independent(&msg.bits) => msg.bits.clone(),
            _ => {
                self.defaults_used += 1;
                (0..self.t)
                    .map(|j| {
                        let mut e = BitString::zeros(self.t);
                        e.set(j, true);
                        e
                    })
                    .find(|e| self.system.is_independent(e))
                    .expect("rank below t leaves an independent unit vector")
            }
        };
        let b = match self.bob.as_mut().expect("Bob sessions carry a behaviour") {
            BobBehaviour::Honest(w) => q.dot(w),
            BobBehaviour::Greedy(alive) => {
                let ones = alive.iter().filter(|s| q.dot(s)).count();
                let b = 2 * ones > alive.len();
                alive.retain(|s| q.dot(s) == b);
                b
            }
        };
        self.system.push(&q, b);
        let msg = IhMessage {
            round: self.round as u16,
            bits: BitString::from_bools(&[b]),
        };
        self.round += 1;
        debug_assert_eq!(self.system.solution_dim(), self.t - self.round);
        if self.round == self.t - 1 {
            self.finish();
        }
        Ok(IhStep::Send(msg))
    }
}

/// Runs both sessions to completion over a perfect channel and returns
/// `(alice_output, bob_output)`.
pub fn run_honest<R: Rng + ?Sized>(
    alice: &mut IhSession,
    bob: &mut IhSession,
    rng: &mut R,
) -> Result<((BitString, BitString), (BitString, BitString))> {
    let mut incoming = None;
    loop {
        match alice.step(incoming.as_ref(), rng)? {
            IhStep::Done(a0, a1) => {
                let b = bob.output().cloned().ok_or_else(|| Error::arg("Bob finished out of step"))?;
                return Ok(((a0, a1), b));
            }
            IhStep::Send(q) => match bob.step(Some(&q), rng)? {
                IhStep::Send(ans) => incoming = Some(ans),
                IhStep::Done(..) => return Err(Error::arg("Bob finished before Alice")),
            },
        }
    }
}

/// Exact `|S|`-based bound on both outputs landing in a set of density
/// `|S| / 2^t`: `16 |S| / 2^t`.
pub fn steering_bound(set_size: usize, t: usize) -> f64 {
    16.0 * set_size as f64 / 2f64.powi(t as i32)
}

pub fn binomial_u64(n: usize, k: usize) -> Option<u64> {
    binomial(n, k).to_u64()
}
