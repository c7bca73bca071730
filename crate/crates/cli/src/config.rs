use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nsm_core::channels::{ChannelModel, StorageSpec};
use nsm_core::coding::{hamming_7_4, rs_build, rs_shortened, BinaryCode};
use nsm_core::protocols::Fault;

#[derive(Debug, Parser)]
#[command(name = "nsm", version, about = "Noisy-storage two-party cryptography toolkit")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "NSM_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity, converse exponent, min-entropy rate and protocol parameters.
    Params(ParamsArgs),
    /// Security-region, BSM-comparison and λ(r) curves as CSV.
    Curves(CurvesArgs),
    /// Run a protocol end to end.
    Run(RunArgs),
    /// Run an attack campaign.
    Attack(AttackArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Depolarizing,
    TwoPauli,
    Identity,
}

#[derive(Debug, Clone, Args)]
pub struct StorageArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Depolarizing)]
    pub model: ModelKind,
    /// Noise parameter (ignored by the identity channel).
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Memory dimension for depolarizing and identity channels.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Storage rate.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
}

impl StorageArgs {
    pub fn spec(&self) -> Result<StorageSpec> {
        let model = match self.model {
            ModelKind::Depolarizing => ChannelModel::depolarizing(self.d, self.r)?,
            ModelKind::TwoPauli => ChannelModel::two_pauli(self.r)?,
            ModelKind::Identity => ChannelModel::identity(self.d)?,
        };
        Ok(StorageSpec::new(model, self.nu)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub storage: StorageArgs,
    /// Number of transmitted qubits for WSE and OT.
    #[arg(long, default_value_t = 1 << 20)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// OT block width.
    #[arg(long, default_value_t = 1024)]
    pub beta: usize,
    #[arg(long, default_value_t = 2.0)]
    pub omega: f64,
    /// Binding error of the commitment.
    #[arg(long, default_value_t = 1e-6)]
    pub eps_prime: f64,
    /// Field degree of the commitment code; its length is (2^m − 1)·m.
    #[arg(long, default_value_t = 16)]
    pub bc_m: u32,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Grid points per curve.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// δ for the λ(r) curve.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// ν for the λ(r) curve.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Wse,
    Commit,
    Ot,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    #[command(flatten)]
    pub storage: StorageArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 4)]
    pub beta: usize,
    #[arg(long, default_value_t = 2.0)]
    pub omega: f64,
    /// Output length (toy mode).
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_prime: f64,
    /// Code for the commitment: hamming74, rs:M:D or rs:M:D:SYMBOLS.
    #[arg(long)]
    pub code: Option<String>,
    /// Skip the feasibility rules and use the given sizes directly.
    #[arg(long)]
    pub toy: bool,
    /// Bob's OT choice bit.
    #[arg(long, default_value_t = 0)]
    pub choice: u8,
    /// Drop the message with this index (repeatable).
    #[arg(long)]
    pub drop: Vec<usize>,
    /// Corrupt the message with this index (repeatable).
    #[arg(long)]
    pub corrupt: Vec<usize>,
    /// Write transcript.json and outcome.json here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl RunArgs {
    pub fn faults(&self) -> Vec<(usize, Fault)> {
        let mut f: Vec<_> = self.drop.iter().map(|&i| (i, Fault::Drop)).collect();
        f.extend(self.corrupt.iter().map(|&i| (i, Fault::Corrupt)));
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackKind {
    Wse,
    Binding,
    Hiding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    MeasureNow,
    BoundedStore,
    NoisyStore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Computational,
    Hadamard,
    Random,
    Breidbart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HidingTargetKind {
    Commit,
    Frot,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    pub kind: AttackKind,
    #[arg(long, value_enum, default_value_t = StrategyKind::MeasureNow)]
    pub strategy: StrategyKind,
    #[arg(long, value_enum, default_value_t = BasisArg::Breidbart)]
    pub basis: BasisArg,
    /// Stored qubits for bounded-store.
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Memory noise parameter for noisy-store.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Storage rate for noisy-store.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Hamming distance of the binding attack.
    #[arg(long, default_value_t = 8)]
    pub dist: usize,
    /// Code: hamming74, rs:M:D or rs:M:D:SYMBOLS.
    #[arg(long, default_value = "rs:3:4:7")]
    pub code: String,
    #[arg(long, value_enum, default_value_t = HidingTargetKind::Commit)]
    pub target: HidingTargetKind,
    #[arg(long, default_value_t = 4)]
    pub ell: usize,
    #[arg(long, default_value_t = 4)]
    pub beta: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Trials for the Monte Carlo checks.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    /// Random instances for the entropy-lemma checks.
    #[arg(long, default_value_t = 2_000)]
    pub instances: usize,
}

/// Parses `hamming74`, `rs:M:D` or `rs:M:D:SYMBOLS`.
pub fn parse_code(spec: &str) -> Result<BinaryCode> {
    if spec == "hamming74" {
        return Ok(hamming_7_4());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<usize> { Ok(s.parse()?) };
    match parts.as_slice() {
        ["rs", m, d] => Ok(rs_build(num(m)? as u32, num(d)?)?),
        ["rs", m, d, s] => Ok(rs_shortened(num(m)? as u32, num(d)?, num(s)?)?),
        _ => bail!("unknown code `{spec}`; expected hamming74, rs:M:D or rs:M:D:SYMBOLS"),
    }
}
