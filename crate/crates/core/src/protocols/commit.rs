//! Randomized string commitment on top of weak string erasure.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::transport::{Direction, MsgType, Transport};
use super::wse::{wse_run, WseOutcome};
use crate::bits::BitString;
use crate::coding::{BinaryCode, Syndrome};
use crate::error::{Error, Result};
use crate::hashing::{ext, ToeplitzSeed};

/// What Alice keeps after committing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliceCommit {
    pub x: BitString,
    pub c: BitString,
}

/// What Bob keeps after committing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BobCommit {
    pub seed: ToeplitzSeed,
    pub syndrome: Syndrome,
    pub index_set: Vec<usize>,
    pub s: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub alice: AliceCommit,
    pub bob: BobCommit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenDecision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenResult {
    pub c_tilde: BitString,
    pub decision: OpenDecision,
}

impl OpenResult {
    pub fn accepted(&self) -> bool {
        self.decision == OpenDecision::Accept
    }
}

/// Commit phase after a completed weak string erasure.
pub fn commit_run<R: Rng + ?Sized>(
    wse: &WseOutcome,
    code: &BinaryCode,
    ell: usize,
    transport: &mut Transport,
    alice_rng: &mut R,
) -> Result<CommitRecord> {
    let n = wse.n();
    if code.n() != n {
        return Err(Error::arg(format!("code length {} differs from n = {n}", code.n())));
    }
    let seed = ToeplitzSeed::random(n, ell, alice_rng)?;
    let w = code.syndrome(&wse.x)?;

    let d = transport.send(Direction::AliceToBob, MsgType::CommitSeed, seed.to_bytes());
    let bob_seed = transport.receive(
        d,
        |b| ToeplitzSeed::from_bytes(b, n, ell),
        || ToeplitzSeed::zero(n, ell).expect("ℓ validated above"),
    );
    let red = code.redundancy();
    let d = transport.send(Direction::AliceToBob, MsgType::Syndrome, w.bits.to_bytes());
    let bob_w = transport.receive(
        d,
        |b| Ok(Syndrome { bits: BitString::from_bytes(b, red)? }),
        || Syndrome { bits: BitString::zeros(red) },
    );

    let c = ext(&wse.x, &seed)?;
    Ok(CommitRecord {
        alice: AliceCommit { x: wse.x.clone(), c },
        bob: BobCommit {
            seed: bob_seed,
            syndrome: bob_w,
            index_set: wse.index_set.clone(),
            s: wse.values.clone(),
        },
    })
}

/// Weak string erasure followed by the commit phase.
pub fn commit_session<A: Rng + ?Sized, B: RngCore>(
    code: &BinaryCode,
    ell: usize,
    transport: &mut Transport,
    alice_rng: &mut A,
    bob_rng: &mut B,
) -> Result<CommitRecord> {
    if ell == 0 || ell > code.n() {
        return Err(Error::arg(format!("ℓ = {ell} must lie in 1..={}", code.n())));
    }
    let wse = wse_run(code.n(), transport, alice_rng, bob_rng)?;
    commit_run(&wse, code, ell, transport, alice_rng)
}

/// Bob's check of an opening.
pub fn open_check(bob: &BobCommit, code: &BinaryCode, claimed_x: &BitString) -> Result<OpenResult> {
    if claimed_x.len() != code.n() {
        return Err(Error::arg(format!("opening has {} bits, expected {}", claimed_x.len(), code.n())));
    }
    let ell = bob.seed.ell();
    if claimed_x.select(&bob.index_set) != bob.s || code.syndrome(claimed_x)? != bob.syndrome {
        return Ok(OpenResult {
            c_tilde: BitString::zeros(ell),
            decision: OpenDecision::Reject,
        });
    }
    Ok(OpenResult {
        c_tilde: ext(claimed_x, &bob.seed)?,
        decision: OpenDecision::Accept,
    })
}

/// Open phase: Alice sends `claimed_x` (her `x` when honest).
pub fn open_run(
    record: &CommitRecord,
    code: &BinaryCode,
    claimed_x: &BitString,
    transport: &mut Transport,
) -> Result<OpenResult> {
    let n = code.n();
    let d = transport.send(Direction::AliceToBob, MsgType::OpenString, claimed_x.to_bytes());
    let got = transport.receive(d, |b| BitString::from_bytes(b, n), || BitString::zeros(n));
    open_check(&record.bob, code, &got)
}

/// `y ⊕ c`: turns the random commitment into a commitment to `y`.
pub fn commit_derandomize(c: &BitString, y: &BitString) -> Result<BitString> {
    if c.len() != y.len() {
        return Err(Error::arg(format!("value has {} bits, commitment has {}", y.len(), c.len())));
    }
    y.xor(c)
}

/// Receiver side: `c̃ ⊕ message` after an accepted opening, `None` otherwise.
pub fn commit_recover(open: &OpenResult, message: &BitString) -> Result<Option<BitString>> {
    if !open.accepted() {
        return Ok(None);
    }
    Ok(Some(open.c_tilde.xor(message)?))
}

/// Sends the masked value over the transport (zeros if it is lost).
pub fn send_masked_value(record: &CommitRecord, y: &BitString, transport: &mut Transport) -> Result<BitString> {
    let msg = commit_derandomize(&record.alice.c, y)?;
    let ell = msg.len();
    let d = transport.send(Direction::AliceToBob, MsgType::CommitMasked, msg.to_bytes());
    Ok(transport.receive(d, |b| BitString::from_bytes(b, ell), || BitString::zeros(ell)))
}
