//! Two-party protocol engines driven over an in-process [`Transport`].
//!
//! Both parties run sequentially in one thread; each message passes through
//! the transport, where it may be dropped or damaged. A receiver that gets
//! nothing usable assumes the all-zero message of the right shape (identity
//! for a permutation) and the transport logs the substitution.

pub mod commit;
pub mod frot;
pub mod transport;
pub mod wse;

pub use commit::{
    commit_derandomize, commit_recover, commit_run, commit_session, open_check, open_run, send_masked_value,
    AliceCommit, BobCommit, CommitRecord, OpenDecision, OpenResult,
};
pub use frot::{frot_run, frot_run_with, ot_derandomize, FrotOutcome};
pub use transport::{Direction, Fault, MsgType, Transport, TranscriptEntry};
pub use wse::{wse_run, wse_run_with, HonestBob, WseBob, WseOutcome};
