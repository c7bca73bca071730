//! Weak string erasure from BB84 states.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::transport::{Direction, MsgType, Transport};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::qsim::{measure_bb84, prepare_bb84, Bb84Register};

/// Outputs of weak string erasure. Indices are 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WseOutcome {
    /// Alice's string `x^n`.
    pub x: BitString,
    /// Bob's index set `I`.
    pub index_set: Vec<usize>,
    /// Bob's substring, aligned with `index_set`.
    pub values: BitString,
}

impl WseOutcome {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Honest correctness: Bob's substring is `x` restricted to `I`.
    pub fn is_consistent(&self) -> bool {
        self.values.len() == self.index_set.len() && self.x.select(&self.index_set) == self.values
    }
}

/// Bob's side of the protocol. A dishonest Bob may do anything with the
/// register before the barrier, but only what he kept survives it.
pub trait WseBob {
    /// Receives the qubits (before the wait).
    fn receive(&mut self, register: &Bb84Register, rng: &mut dyn RngCore);
    /// Learns Alice's bases (after the wait) and returns `(I, x_I)`.
    fn finish(&mut self, theta: &BitString, rng: &mut dyn RngCore) -> (Vec<usize>, BitString);
}

/// Measures in uniform random bases and keeps the matching positions.
#[derive(Debug, Clone, Default)]
pub struct HonestBob {
    theta_tilde: BitString,
    outcomes: BitString,
}

impl HonestBob {
    pub fn new() -> Self {
        Self::default()
    }
}

impl WseBob for HonestBob {
    fn receive(&mut self, register: &Bb84Register, rng: &mut dyn RngCore) {
        self.theta_tilde = BitString::random(register.len(), rng);
        self.outcomes = measure_bb84(register, &self.theta_tilde, rng).expect("bases sized to the register");
    }

    fn finish(&mut self, theta: &BitString, _rng: &mut dyn RngCore) -> (Vec<usize>, BitString) {
        let index_set: Vec<usize> = (0..theta.len()).filter(|&i| theta.get(i) == self.theta_tilde.get(i)).collect();
        let values = self.outcomes.select(&index_set);
        (index_set, values)
    }
}

/// Honest weak string erasure.
pub fn wse_run<A: Rng + ?Sized, B: RngCore>(
    n: usize,
    transport: &mut Transport,
    alice_rng: &mut A,
    bob_rng: &mut B,
) -> Result<WseOutcome> {
    wse_run_with(n, transport, alice_rng, &mut HonestBob::new(), bob_rng)
}

/// Weak string erasure against an arbitrary Bob.
pub fn wse_run_with<A: Rng + ?Sized, B: RngCore>(
    n: usize,
    transport: &mut Transport,
    alice_rng: &mut A,
    bob: &mut dyn WseBob,
    bob_rng: &mut B,
) -> Result<WseOutcome> {
    if n == 0 || n > u32::MAX as usize {
        return Err(Error::arg("n must lie in 1..=u32::MAX"));
    }
    // 1. Alice prepares H^θ|x⟩ and sends it.
    let x = BitString::random(n, alice_rng);
    let theta = BitString::random(n, alice_rng);
    let register = prepare_bb84(&x, &theta)?;
    let announce = transport.send(Direction::AliceToBob, MsgType::Qubits, (n as u32).to_le_bytes().to_vec());
    let arrived = transport.receive(
        announce,
        |b| match <[u8; 4]>::try_from(b) {
            Ok(a) if u32::from_le_bytes(a) as usize == n => Ok(true),
            _ => Err(Error::Format("qubit announcement does not match n".into())),
        },
        || false,
    );
    let register = if arrived { register } else { Bb84Register::vacuum(n) };

    // 2. Bob measures (or stores).
    bob.receive(&register, bob_rng);

    transport.wait_barrier();

    // 3. Alice reveals θ.
    let delivery = transport.send(Direction::AliceToBob, MsgType::Bases, theta.to_bytes());
    let theta_b = transport.receive(delivery, |b| BitString::from_bytes(b, n), || BitString::zeros(n));

    // 4. Bob keeps the matching positions.
    let (index_set, values) = bob.finish(&theta_b, bob_rng);
    Ok(WseOutcome { x, index_set, values })
}
