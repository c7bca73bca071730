use std::time::Instant;

use anyhow::Result;
use nsm_core::attacks::{
    check_entropy_lemma_22, check_entropy_lemma_23, conditioning_identity, run_binding_attack, run_wse_attack,
    uncertainty_scan, AttackStrategy, ClassicalChannel, CctState, MeasureBasis, BREIDBART_GUESS,
};
use nsm_core::channels::ChannelModel;
use nsm_core::coding::toy_codes;
use nsm_core::ihash::{run_honest, IhSession};
use nsm_core::protocols::{commit_session, frot_run, open_run, Transport};
use nsm_core::qsim::CcState;
use nsm_core::secparams::{bsm_threshold, open_grid, ot_params_toy, security_threshold, storage_rate_threshold, ModelFamily};
use nsm_core::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::VerifyArgs;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn thresholds() -> Result<(bool, String)> {
    let q = security_threshold(ModelFamily::Depolarizing { d: 2 }, 1.0)?;
    let p = security_threshold(ModelFamily::TwoPauli, 1.0)?;
    let t = security_threshold(ModelFamily::Depolarizing { d: 3 }, 1.0)?;
    let ok = (0.76..=0.79).contains(&q) && (0.76..=0.79).contains(&p) && (0.60..=0.62).contains(&t);
    Ok((ok, format!("qubit {q:.6}, two-pauli {p:.6}, qutrit {t:.6}")))
}

fn bounded_storage() -> Result<(bool, String)> {
    let nu = storage_rate_threshold(&ChannelModel::identity(2)?)?;
    Ok(((nu - 0.5).abs() <= 1e-6, format!("ν* = {nu:.9}")))
}

fn bsm_dominance() -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for nu in open_grid(1.0, 50) {
        let b = bsm_threshold(nu)?;
        let r = security_threshold(ModelFamily::Depolarizing { d: 2 }, nu)?;
        let interior = b < 1.0 && r < 1.0;
        if r < b || (interior && r <= b) {
            return Ok((false, format!("ν = {nu}: noisy {r} vs bsm {b}")));
        }
        if interior {
            worst = worst.min(r - b);
        }
    }
    Ok((true, format!("smallest interior gap {worst:.6}")))
}

fn uncertainty(trials: u64, seed: u64) -> Result<(bool, String)> {
    let scan = uncertainty_scan(100)?;
    let mc = run_wse_attack(AttackStrategy::MeasureNow { basis: MeasureBasis::Breidbart }, 100, trials, seed)?;
    let ok = (scan.max_guess - BREIDBART_GUESS).abs() <= 5e-4 && mc.per_bit.contains(BREIDBART_GUESS);
    Ok((ok, format!("scan {:.6}, Monte Carlo {:.6}", scan.max_guess, mc.per_bit.estimate)))
}

fn binding(trials: u64, seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    for code in toy_codes() {
        let d = code.dmin();
        for dist in d.div_ceil(2)..=code.n().min(d + 2) {
            let r = run_binding_attack(&code, dist, trials / 10, seed)?;
            ok &= r.report.ci_low <= r.envelope;
        }
    }
    Ok((ok, "accept frequency within the 2^{-d/2} envelope".into()))
}

fn interactive_hashing(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = 0;
    for t in 2..=8usize {
        for v in 0..1u64 << t {
            let w = BitString::from_u64(v, t);
            let mut alice = IhSession::alice(t)?;
            let mut bob = IhSession::bob(w.clone())?;
            let (a, b) = run_honest(&mut alice, &mut bob, &mut rng)?;
            if a != b || a.0 == a.1 || (a.0 != w && a.1 != w) {
                return Ok((false, format!("t = {t}, w = {w}")));
            }
            runs += 1;
        }
    }
    Ok((true, format!("{runs} exhaustive runs")))
}

fn completeness(trials: u64, seed: u64) -> Result<(bool, String)> {
    let runs = (trials / 100).max(10);
    let code = nsm_core::coding::rs_build(3, 3)?;
    let params = ot_params_toy(64, 4, 8)?;
    for i in 0..runs {
        let mut a = ChaCha8Rng::seed_from_u64(seed ^ i);
        let mut b = ChaCha8Rng::seed_from_u64(!(seed ^ i));
        let mut tr = Transport::new();
        let rec = commit_session(&code, 4, &mut tr, &mut a, &mut b)?;
        let open = open_run(&rec, &code, &rec.alice.x, &mut tr)?;
        if !open.accepted() || open.c_tilde != rec.alice.c {
            return Ok((false, format!("commitment run {i} rejected")));
        }
        let out = frot_run(&params, &mut Transport::new(), &mut a, &mut b)?;
        if !out.padded && !out.is_correct() {
            return Ok((false, format!("oblivious-transfer run {i} incorrect")));
        }
    }
    Ok((true, format!("{runs} commitment and {runs} oblivious-transfer runs")))
}

fn entropy_lemmas(instances: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..instances {
        let (nx, nt, nq) = (rng.gen_range(2..9), rng.gen_range(1..4), rng.gen_range(1..7));
        let ch = ClassicalChannel::random(nq, rng.gen_range(1..5), &mut rng);
        let w: Vec<f64> = (0..nx * nq).map(|_| rng.gen::<f64>().powi(2)).collect();
        if !check_entropy_lemma_22(&CcState::from_weights(nx, nq, w)?, &ch)?.holds {
            return Ok((false, "channel min-entropy bound violated".into()));
        }
        let w: Vec<f64> = (0..nx * nt * nq).map(|_| rng.gen::<f64>().powi(2)).collect();
        let st = CctState::from_weights(nx, nt, nq, w)?;
        let eps = rng.gen_range(0.05..=1.0);
        if !check_entropy_lemma_23(&st, &ch, eps)?.holds {
            return Ok((false, "conditioned min-entropy bound violated".into()));
        }
        let (l, r) = conditioning_identity(&st);
        worst_gap = worst_gap.max((l - r).abs());
    }
    Ok((worst_gap <= 1e-12, format!("{instances} instances, conditioning gap {worst_gap:.3e}")))
}

pub fn run(args: &VerifyArgs, seed: u64) -> Vec<Check> {
    vec![
        check("security_thresholds", thresholds),
        check("bounded_storage_boundary", bounded_storage),
        check("bsm_dominance", bsm_dominance),
        check("uncertainty_constant", || uncertainty(args.trials, seed)),
        check("binding_envelope", || binding(args.trials, seed)),
        check("interactive_hashing", || interactive_hashing(seed)),
        check("protocol_completeness", || completeness(args.trials, seed)),
        check("entropy_lemmas", || entropy_lemmas(args.instances, seed)),
    ]
}
