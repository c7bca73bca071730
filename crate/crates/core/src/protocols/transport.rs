//! In-process duplex channel with a wait barrier, fault injection and a
//! message log.
//!
//! Frames are `len: u32 LE` (payload length), `type: u8`, payload.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[repr(u8)]
pub enum MsgType {
    /// Announces the quantum transmission; the payload is the qubit count.
    Qubits = 1,
    Bases = 2,
    CommitSeed = 3,
    Syndrome = 4,
    OpenString = 5,
    Permutation = 6,
    IhQuery = 7,
    IhAnswer = 8,
    PaSeeds = 9,
    OtChoiceFlip = 10,
    OtMasked = 11,
    CommitMasked = 12,
    WaitBarrier = 0xFF,
}

impl MsgType {
    pub const ALL: [MsgType; 13] = [
        MsgType::Qubits,
        MsgType::Bases,
        MsgType::CommitSeed,
        MsgType::Syndrome,
        MsgType::OpenString,
        MsgType::Permutation,
        MsgType::IhQuery,
        MsgType::IhAnswer,
        MsgType::PaSeeds,
        MsgType::OtChoiceFlip,
        MsgType::OtMasked,
        MsgType::CommitMasked,
        MsgType::WaitBarrier,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgType::Qubits => "QUBITS",
            MsgType::Bases => "BASES",
            MsgType::CommitSeed => "COMMIT_SEED",
            MsgType::Syndrome => "SYNDROME",
            MsgType::OpenString => "OPEN_STRING",
            MsgType::Permutation => "PERMUTATION",
            MsgType::IhQuery => "IH_QUERY",
            MsgType::IhAnswer => "IH_ANSWER",
            MsgType::PaSeeds => "PA_SEEDS",
            MsgType::OtChoiceFlip => "OT_CHOICE_FLIP",
            MsgType::OtMasked => "OT_MASKED",
            MsgType::CommitMasked => "COMMIT_MASKED",
            MsgType::WaitBarrier => "WAIT_BARRIER",
        }
    }
}

pub fn encode_frame(ty: MsgType, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(5 + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.push(ty.code());
    out.extend_from_slice(payload);
    out
}

/// Decodes one frame from the front of `bytes`; returns the frame and the
/// number of bytes consumed.
pub fn decode_frame(bytes: &[u8]) -> Result<(MsgType, Vec<u8>, usize)> {
    if bytes.len() < 5 {
        return Err(Error::Format("frame shorter than its header".into()));
    }
    let len = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    let ty = MsgType::from_code(bytes[4]).ok_or_else(|| Error::Format(format!("unknown message type {}", bytes[4])))?;
    let end = 5usize
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| Error::Format("frame payload truncated".into()))?;
    Ok((ty, bytes[5..end].to_vec(), end))
}

/// Barrier flag bits of a transcript entry.
pub mod flags {
    /// The entry is the wait barrier itself.
    pub const BARRIER: u8 = 0x01;
    /// The message was sent after the barrier.
    pub const AFTER_BARRIER: u8 = 0x02;
    /// The message was lost in transit.
    pub const DROPPED: u8 = 0x04;
    /// The message was damaged in transit.
    pub const CORRUPTED: u8 = 0x08;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub direction: Direction,
    #[serde(rename = "type")]
    pub msg_type: String,
    pub payload_hex: String,
    pub barrier_flags: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    Drop,
    /// Appends a byte to the payload, which no parser accepts.
    Corrupt,
}

/// A receiver replaced a missing or malformed message by its default.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub index: usize,
    pub msg_type: MsgType,
    pub reason: String,
}

/// What reached the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub index: usize,
    pub msg_type: MsgType,
    pub payload: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Default)]
pub struct Transport {
    log: Vec<TranscriptEntry>,
    faults: BTreeMap<usize, Fault>,
    sent: usize,
    barrier_passed: bool,
    substitutions: Vec<Substitution>,
}

impl Transport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies `fault` to the message with the given index (0-based, counting
    /// messages only, not the barrier).
    pub fn with_fault(mut self, index: usize, fault: Fault) -> Self {
        self.faults.insert(index, fault);
        self
    }

    pub fn message_count(&self) -> usize {
        self.sent
    }

    pub fn barrier_passed(&self) -> bool {
        self.barrier_passed
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.log
    }

    pub fn substitutions(&self) -> &[Substitution] {
        &self.substitutions
    }

    pub fn transcript_json(&self) -> String {
        serde_json::to_string_pretty(&self.log).expect("transcript entries serialize")
    }

    /// Marks the wait time `Δt`.
    pub fn wait_barrier(&mut self) {
        self.barrier_passed = true;
        self.log.push(TranscriptEntry {
            direction: Direction::Both,
            msg_type: MsgType::WaitBarrier.name().into(),
            payload_hex: String::new(),
            barrier_flags: flags::BARRIER,
        });
    }

    pub fn send(&mut self, direction: Direction, ty: MsgType, payload: Vec<u8>) -> Delivery {
        let index = self.sent;
        self.sent += 1;
        let fault = self.faults.get(&index).copied();
        let mut barrier_flags = if self.barrier_passed { flags::AFTER_BARRIER } else { 0 };
        match fault {
            Some(Fault::Drop) => barrier_flags |= flags::DROPPED,
            Some(Fault::Corrupt) => barrier_flags |= flags::CORRUPTED,
            None => {}
        }
        self.log.push(TranscriptEntry {
            direction,
            msg_type: ty.name().into(),
            payload_hex: hex::encode(&payload),
            barrier_flags,
        });
        let frame = match fault {
            Some(Fault::Drop) => None,
            Some(Fault::Corrupt) => {
                let mut damaged = payload;
                damaged.push(0xA5);
                Some(encode_frame(ty, &damaged))
            }
            None => Some(encode_frame(ty, &payload)),
        };
        let payload = frame.and_then(|f| match decode_frame(&f) {
            Ok((t, p, _)) if t == ty => Some(p),
            _ => None,
        });
        Delivery {
            index,
            msg_type: ty,
            payload,
        }
    }

    /// Parses a delivery, substituting `default()` (and logging it) when the
    /// message is missing or malformed.
    pub fn receive<T>(
        &mut self,
        delivery: Delivery,
        parse: impl FnOnce(&[u8]) -> Result<T>,
        default: impl FnOnce() -> T,
    ) -> T {
        let reason = match delivery.payload {
            None => "missing".to_string(),
            Some(bytes) => match parse(&bytes) {
                Ok(v) => return v,
                Err(e) => e.to_string(),
            },
        };
        self.substitutions.push(Substitution {
            index: delivery.index,
            msg_type: delivery.msg_type,
            reason,
        });
        default()
    }

    /// Records a substitution made by a protocol engine itself.
    pub fn note_substitution(&mut self, index: usize, msg_type: MsgType, reason: impl Into<String>) {
        self.substitutions.push(Substitution {
            index,
            msg_type,
            reason: reason.into(),
        });
    }
}
