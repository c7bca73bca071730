//! Fully randomized 1-2 oblivious transfer from weak string erasure, plus the
//! wrapper turning it into OT of chosen strings.

use rand::seq::{index, SliceRandom};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::transport::{Direction, MsgType, Transport};
use super::wse::{wse_run_with, HonestBob, WseBob};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hashing::{ext, ToeplitzSeed};
use crate::ihash::{IhMessage, IhSession, IhStep, SubsetEncoding};
use crate::secparams::OtParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrotOutcome {
    pub s0: BitString,
    pub s1: BitString,
    pub c: bool,
    pub y: BitString,
    /// `pi[src] = dest` on flat matrix indices `(j−1)β + (α−1)`.
    pub pi: Vec<usize>,
    /// Bob's interactive-hashing input.
    pub w: BitString,
    /// Interactive-hashing outputs as seen by Alice.
    pub w0: BitString,
    pub w1: BitString,
    pub r0: ToeplitzSeed,
    pub r1: ToeplitzSeed,
    /// Alice's string, read row by row as the matrix `z`.
    pub z: BitString,
    /// `|I|` before Bob truncated or padded it.
    pub raw_index_count: usize,
    /// Whether Bob had to pad `I` with guessed positions.
    pub padded: bool,
    /// False for toy parameters outside the proven regime.
    pub covered: bool,
}

impl FrotOutcome {
    /// `y = s_c`.
    pub fn is_correct(&self) -> bool {
        self.y == if self.c { &self.s1 } else { &self.s0 }.clone()
    }
}

/// Cells of the rows in `rows` (1-based), row by row.
fn row_cells(rows: &[usize], beta: usize) -> Vec<usize> {
    rows.iter().flat_map(|&j| (j - 1) * beta..j * beta).collect()
}

fn encode_permutation(pi: &[usize]) -> Vec<u8> {
    pi.iter().flat_map(|&d| (d as u32).to_le_bytes()).collect()
}

fn decode_permutation(bytes: &[u8], n: usize) -> Result<Vec<usize>> {
    if bytes.len() != 4 * n {
        return Err(Error::Format(format!("permutation needs {} bytes, got {}", 4 * n, bytes.len())));
    }
    let pi: Vec<usize> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]) as usize)
        .collect();
    let mut seen = vec![false; n];
    for &d in &pi {
        if d >= n || std::mem::replace(&mut seen[d], true) {
            return Err(Error::Format("not a permutation of the matrix entries".into()));
        }
    }
    Ok(pi)
}

/// Uniform permutation with `src ∈ I ⇔ row(pi[src]) ∈ rows`.
pub fn sample_block_permutation<R: Rng + ?Sized>(
    n: usize,
    beta: usize,
    index_set: &[usize],
    rows: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut inside = row_cells(rows, beta);
    if inside.len() != index_set.len() {
        return Err(Error::arg(format!(
            "{} selected cells cannot hold {} positions",
            inside.len(),
            index_set.len()
        )));
    }
    let mut in_rows = vec![false; n / beta];
    for &j in rows {
        in_rows[j - 1] = true;
    }
    let mut outside: Vec<usize> = (0..n).filter(|&d| !in_rows[d / beta]).collect();
    inside.shuffle(rng);
    outside.shuffle(rng);
    let mut in_i = vec![false; n];
    for &i in index_set {
        in_i[i] = true;
    }
    let (mut a, mut b) = (inside.into_iter(), outside.into_iter());
    Ok((0..n)
        .map(|src| if in_i[src] { a.next() } else { b.next() }.expect("cell counts match"))
        .collect())
}

/// Bob's step 1: a uniform `n/4`-subset of `I`, or `I` padded with uniform
/// positions outside it (whose bits are set to 0). Returns sorted positions
/// with their bits.
pub fn adjust_index_set<R: Rng + ?Sized>(
    n: usize,
    index_set: &[usize],
    values: &BitString,
    rng: &mut R,
) -> (Vec<usize>, BitString) {
    let target = n / 4;
    let mut pairs: Vec<(usize, bool)> = index_set.iter().copied().zip(values.iter()).collect();
    if pairs.len() >= target {
        let keep = index::sample(rng, pairs.len(), target).into_vec();
        pairs = keep.into_iter().map(|k| pairs[k]).collect();
    } else {
        let mut member = vec![false; n];
        for &(i, _) in &pairs {
            member[i] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !member[i]).collect();
        let extra = index::sample(rng, rest.len(), target - pairs.len());
        pairs.extend(extra.into_iter().map(|k| (rest[k], false)));
    }
    pairs.sort_unstable();
    (pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

/// Runs weak string erasure followed by the reduction to FROT.
pub fn frot_run<A: Rng + ?Sized, B: RngCore>(
    params: &OtParams,
    transport: &mut Transport,
    alice_rng: &mut A,
    bob_rng: &mut B,
) -> Result<FrotOutcome> {
    frot_run_with(params, transport, alice_rng, &mut HonestBob::new(), bob_rng)
}

/// As [`frot_run`], with `bob` in place of Bob's erasure-phase behaviour;
/// the rest of Bob's steps are followed honestly.
pub fn frot_run_with<A: Rng + ?Sized, B: RngCore>(
    params: &OtParams,
    transport: &mut Transport,
    alice_rng: &mut A,
    bob: &mut dyn WseBob,
    bob_rng: &mut B,
) -> Result<FrotOutcome> {
    let (n, beta, m, ell) = (params.n, params.beta, params.m, params.ell);
    if beta == 0 || n != m * beta || m % 4 != 0 || ell == 0 || ell > n / 4 {
        return Err(Error::arg("inconsistent oblivious-transfer parameters"));
    }
    let encoding = SubsetEncoding::new(m)?;
    let quarter = n / 4;

    // 1. Weak string erasure; Bob truncates or pads I to n/4.
    let wse = wse_run_with(n, transport, alice_rng, bob, bob_rng)?;
    let raw_index_count = wse.index_set.len();
    let (index_set, values) = adjust_index_set(n, &wse.index_set, &wse.values, bob_rng);

    // 2. Bob picks J = Enc(w) and a block permutation, and sends it.
    let (rows, w) = loop {
        let mut rows: Vec<usize> = index::sample(bob_rng, m, m / 4).into_iter().map(|j| j + 1).collect();
        rows.sort_unstable();
        if let Some(w) = encoding.enc_inverse(&rows)? {
            break (rows, w);
        }
    };
    let pi = sample_block_permutation(n, beta, &index_set, &rows, bob_rng)?;
    let d = transport.send(Direction::BobToAlice, MsgType::Permutation, encode_permutation(&pi));
    let alice_pi = transport.receive(d, |b| decode_permutation(b, n), || (0..n).collect());

    // 3. Interactive hashing on w.
    let t = encoding.t();
    let mut alice_ih = IhSession::alice(t)?;
    let mut bob_ih = IhSession::bob(w.clone())?;
    let mut answer: Option<IhMessage> = None;
    let (w0, w1) = loop {
        match alice_ih.step(answer.as_ref(), alice_rng)? {
            IhStep::Done(a, b) => break (a, b),
            IhStep::Send(q) => {
                let d = transport.send(Direction::AliceToBob, MsgType::IhQuery, q.to_bytes());
                let index = d.index;
                let got = transport.receive(d, |b| IhMessage::from_bytes(b).map(Some), || None);
                let before = bob_ih.defaults_used();
                let step = bob_ih.step(got.as_ref(), bob_rng)?;
                if got.is_some() && bob_ih.defaults_used() > before {
                    transport.note_substitution(index, MsgType::IhQuery, "dependent query");
                }
                let IhStep::Send(ans) = step else {
                    return Err(Error::arg("interactive hashing finished out of step"));
                };
                let d = transport.send(Direction::BobToAlice, MsgType::IhAnswer, ans.to_bytes());
                answer = transport.receive(d, |b| IhMessage::from_bytes(b).map(Some), || None);
            }
        }
    };
    let c = bob_ih.choice_index().expect("Bob's own constraints keep w");

    // 4. Alice sends the hashing seeds.
    let r0 = ToeplitzSeed::random(quarter, ell, alice_rng)?;
    let r1 = ToeplitzSeed::random(quarter, ell, alice_rng)?;
    let seed_bytes = r0.to_bytes().len();
    let mut payload = r0.to_bytes();
    payload.extend(r1.to_bytes());
    let d = transport.send(Direction::AliceToBob, MsgType::PaSeeds, payload);
    let (b_r0, b_r1) = transport.receive(
        d,
        |b| {
            if b.len() != 2 * seed_bytes {
                return Err(Error::Format("seed pair has the wrong length".into()));
            }
            Ok((
                ToeplitzSeed::from_bytes(&b[..seed_bytes], quarter, ell)?,
                ToeplitzSeed::from_bytes(&b[seed_bytes..], quarter, ell)?,
            ))
        },
        || {
            let z = ToeplitzSeed::zero(quarter, ell).expect("ℓ ≤ n/4");
            (z.clone(), z)
        },
    );

    // 5. Alice hashes the two row sets of π(z).
    let mut permuted = BitString::zeros(n);
    for (src, &dest) in alice_pi.iter().enumerate() {
        permuted.set(dest, wse.x.get(src));
    }
    let s0 = ext(&permuted.select(&row_cells(&encoding.enc(&w0)?, beta)), &r0)?;
    let s1 = ext(&permuted.select(&row_cells(&encoding.enc(&w1)?, beta)), &r1)?;

    // 6. Bob rebuilds π(z) on his rows from s.
    let mut known = BitString::zeros(n);
    for (k, &src) in index_set.iter().enumerate() {
        known.set(pi[src], values.get(k));
    }
    let bob_bits = known.select(&row_cells(&rows, beta));
    let y = ext(&bob_bits, if c { &b_r1 } else { &b_r0 })?;

    Ok(FrotOutcome {
        s0,
        s1,
        c,
        y,
        pi,
        w,
        w0,
        w1,
        r0,
        r1,
        z: wse.x,
        raw_index_count,
        padded: raw_index_count < quarter,
        covered: params.covered,
    })
}

/// Bob's announcement `M = C ⊕ D`.
pub fn ot_choice_flip(c: bool, d: bool) -> bool {
    c ^ d
}

/// Alice's masks `(s0 ⊕ y_M, s1 ⊕ y_{1−M})`.
pub fn ot_sender_masks(
    s0: &BitString,
    s1: &BitString,
    y0: &BitString,
    y1: &BitString,
    flip: bool,
) -> Result<(BitString, BitString)> {
    let (first, second) = if flip { (y1, y0) } else { (y0, y1) };
    Ok((s0.xor(first)?, s1.xor(second)?))
}

/// Bob unmasks the mask indexed by `c` with his key `s_c`.
pub fn ot_receiver_unmask(c: bool, s_c: &BitString, masks: &(BitString, BitString)) -> Result<BitString> {
    if c { &masks.1 } else { &masks.0 }.xor(s_c)
}

/// Two-message wrapper: Bob with choice `d` learns `y_d`.
pub fn ot_derandomize(
    frot: &FrotOutcome,
    y0: &BitString,
    y1: &BitString,
    d: bool,
    transport: &mut Transport,
) -> Result<BitString> {
    let ell = frot.s0.len();
    if y0.len() != ell || y1.len() != ell {
        return Err(Error::arg(format!("OT inputs must have ℓ = {ell} bits")));
    }
    let flip = ot_choice_flip(frot.c, d);
    let msg = transport.send(Direction::BobToAlice, MsgType::OtChoiceFlip, vec![flip as u8]);
    let alice_flip = transport.receive(
        msg,
        |b| match b {
            [0] => Ok(false),
            [1] => Ok(true),
            _ => Err(Error::Format("choice flip must be a single 0/1 byte".into())),
        },
        || false,
    );
    let masks = ot_sender_masks(&frot.s0, &frot.s1, y0, y1, alice_flip)?;
    let mut payload = masks.0.to_bytes();
    payload.extend(masks.1.to_bytes());
    let half = ell.div_ceil(8);
    let msg = transport.send(Direction::AliceToBob, MsgType::OtMasked, payload);
    let bob_masks = transport.receive(
        msg,
        |b| {
            if b.len() != 2 * half {
                return Err(Error::Format("masked pair has the wrong length".into()));
            }
            Ok((BitString::from_bytes(&b[..half], ell)?, BitString::from_bytes(&b[half..], ell)?))
        },
        || (BitString::zeros(ell), BitString::zeros(ell)),
    );
    ot_receiver_unmask(frot.c, &frot.y, &bob_masks)
}
