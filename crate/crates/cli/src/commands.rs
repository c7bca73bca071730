use std::fs;

use anyhow::{bail, Context, Result};
use nsm_core::attacks::{
    run_binding_attack, run_hiding_attack, run_wse_attack, AttackStrategy, HidingTarget, MeasureBasis,
};
use nsm_core::channels::{capacity, converse_exponent};
use nsm_core::protocols::{
    commit_run, frot_run, open_run, ot_derandomize, send_masked_value, wse_run, Transport,
};
use nsm_core::secparams::{
    bc_distance, bc_params, bsm_comparison_curve, lambda_vs_r, open_grid, ot_params, ot_params_toy, security_region,
    wse_rate, ModelFamily,
};
use nsm_core::{coding::rs_build, BitString, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{
    parse_code, AttackArgs, AttackKind, BasisArg, CurvesArgs, HidingTargetKind, ParamsArgs, Protocol, RunArgs,
    StrategyKind,
};
use crate::output::{to_value, write_csv, write_json};

const GAMMA_SAMPLES: usize = 10;

/// `{status: infeasible, inequality, detail}` for a feasibility error.
pub fn infeasible_value(e: &Error) -> Option<Value> {
    match e {
        Error::Feasibility { inequality, detail } => Some(json!({
            "status": "infeasible",
            "inequality": inequality,
            "detail": detail,
        })),
        _ => None,
    }
}

fn section<T: serde::Serialize>(r: nsm_core::Result<T>) -> Result<Value> {
    match r {
        Ok(v) => {
            let mut v = to_value(&v)?;
            v["status"] = json!("ok");
            Ok(v)
        }
        Err(e) => infeasible_value(&e).ok_or_else(|| e.into()),
    }
}

pub fn params(args: &ParamsArgs) -> Result<Value> {
    let storage = args.storage.spec()?;
    let log_d = storage.model.log_dim();
    let gamma = (1..=GAMMA_SAMPLES)
        .map(|i| converse_exponent(&storage.model, log_d * i as f64 / GAMMA_SAMPLES as f64))
        .collect::<nsm_core::Result<Vec<_>>>()?;
    let wse = wse_rate(&storage, args.n, args.delta)?;
    let bc_n = ((1usize << args.bc_m) - 1) * args.bc_m as usize;
    let bc = section(bc_params(&storage, bc_n, args.delta, args.eps_prime))?;
    let ot = section(ot_params(&storage, args.n, args.delta, args.omega, args.beta))?;
    to_value(&json!({
        "status": "ok",
        "storage": storage,
        "capacity": capacity(&storage.model),
        "capacity_load": storage.capacity_load(),
        "gamma": gamma,
        "n": args.n,
        "delta": args.delta,
        "lambda": wse.lambda,
        "eps": wse.eps,
        "regime": wse.regime,
        "bc": bc,
        "ot": ot,
    }))
}

pub const CURVE_FAMILIES: [ModelFamily; 3] = [
    ModelFamily::Depolarizing { d: 2 },
    ModelFamily::TwoPauli,
    ModelFamily::Depolarizing { d: 3 },
];

fn rounded_rows<T: serde::Serialize + serde::de::DeserializeOwned>(rows: Vec<T>) -> Result<Vec<T>> {
    rows.iter().map(|r| Ok(serde_json::from_value(to_value(r)?)?)).collect()
}

pub fn curves(args: &CurvesArgs) -> Result<Value> {
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let nu = open_grid(1.0, args.points);
    let mut region = Vec::new();
    for family in CURVE_FAMILIES {
        region.extend(security_region(family, &nu)?);
    }
    let mut bsm = bsm_comparison_curve(&nu)?;
    bsm.extend(security_region(ModelFamily::Depolarizing { d: 2 }, &nu)?);
    let r: Vec<f64> = (0..=args.points).map(|i| i as f64 / args.points as f64).collect();
    let mut lambda = Vec::new();
    for family in [ModelFamily::Depolarizing { d: 2 }, ModelFamily::TwoPauli] {
        lambda.extend(lambda_vs_r(family, args.lambda_nu, args.delta, &r)?);
    }
    let files = [
        ("security_region.csv", region.len()),
        ("bsm_comparison.csv", bsm.len()),
        ("lambda_vs_r.csv", lambda.len()),
    ];
    write_csv(&args.out_dir.join(files[0].0), &rounded_rows(region)?)?;
    write_csv(&args.out_dir.join(files[1].0), &rounded_rows(bsm)?)?;
    write_csv(&args.out_dir.join(files[2].0), &rounded_rows(lambda)?)?;
    Ok(json!({
        "status": "ok",
        "files": files.iter().map(|(f, rows)| json!({"path": args.out_dir.join(f), "rows": rows})).collect::<Vec<_>>(),
    }))
}

fn transport(args: &RunArgs) -> Transport {
    args.faults().into_iter().fold(Transport::new(), |t, (i, f)| t.with_fault(i, f))
}

fn rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut a = ChaCha8Rng::seed_from_u64(seed);
    a.set_stream(0);
    let mut b = ChaCha8Rng::seed_from_u64(seed);
    b.set_stream(1);
    (a, b)
}

pub fn run(args: &RunArgs, seed: u64) -> Result<Value> {
    let (mut a, mut b) = rngs(seed);
    let mut tr = transport(args);
    let outcome = match args.protocol {
        Protocol::Wse => {
            let n = args.n.unwrap_or(64);
            if !args.toy {
                wse_rate(&args.storage.spec()?, n, args.delta)?;
            }
            let out = wse_run(n, &mut tr, &mut a, &mut b)?;
            json!({
                "n": n,
                "x": out.x,
                "index_set": out.index_set,
                "values": out.values,
                "consistent": out.is_consistent(),
            })
        }
        Protocol::Commit => {
            let (code, ell) = if args.toy {
                let code = parse_code(args.code.as_deref().unwrap_or("rs:3:3:7"))?;
                let ell = args.ell.unwrap_or(4);
                (code, ell)
            } else {
                let n = args.n.unwrap_or(2040);
                let p = bc_params(&args.storage.spec()?, n, args.delta, args.eps_prime)?;
                (rs_build(p.field_degree, bc_distance(args.eps_prime)?)?, p.ell)
            };
            if ell == 0 || ell > code.n() {
                bail!("ℓ = {ell} must lie in 1..={}", code.n());
            }
            let wse = wse_run(code.n(), &mut tr, &mut a, &mut b)?;
            let rec = commit_run(&wse, &code, ell, &mut tr, &mut a)?;
            let y = BitString::random(ell, &mut a);
            let masked = send_masked_value(&rec, &y, &mut tr)?;
            let open = open_run(&rec, &code, &rec.alice.x, &mut tr)?;
            let recovered = nsm_core::protocols::commit_recover(&open, &masked)?;
            json!({
                "n": code.n(),
                "code": code.name(),
                "ell": ell,
                "c": rec.alice.c,
                "c_tilde": open.c_tilde,
                "decision": open.decision,
                "accepted": open.accepted(),
                "y": y,
                "recovered_y": recovered,
            })
        }
        Protocol::Ot => {
            let n = args.n.unwrap_or(64);
            let params = if args.toy {
                ot_params_toy(n, args.beta, args.ell.unwrap_or(8))?
            } else {
                ot_params(&args.storage.spec()?, n, args.delta, args.omega, args.beta)?
            };
            if args.choice > 1 {
                bail!("--choice must be 0 or 1");
            }
            let d = args.choice == 1;
            let frot = frot_run(&params, &mut tr, &mut a, &mut b)?;
            let y0 = BitString::random(params.ell, &mut a);
            let y1 = BitString::random(params.ell, &mut a);
            let got = ot_derandomize(&frot, &y0, &y1, d, &mut tr)?;
            let expected = if d { &y1 } else { &y0 };
            json!({
                "params": params,
                "c": frot.c,
                "s0": frot.s0,
                "s1": frot.s1,
                "y": frot.y,
                "frot_correct": frot.is_correct(),
                "raw_index_count": frot.raw_index_count,
                "padded": frot.padded,
                "choice": d,
                "y0": y0,
                "y1": y1,
                "received": got,
                "ot_correct": (&got == expected),
            })
        }
    };
    let protocol = match args.protocol {
        Protocol::Wse => "wse",
        Protocol::Commit => "commit",
        Protocol::Ot => "ot",
    };
    let report = to_value(&json!({
        "status": "ok",
        "protocol": protocol,
        "seed": seed,
        "toy_mode": args.toy,
        "outcome": outcome,
        "substitutions": tr.substitutions(),
        "message_count": tr.message_count(),
    }))?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("outcome.json"), &report)?;
        write_json(&dir.join("transcript.json"), &to_value(&tr.transcript())?)?;
    }
    Ok(report)
}

fn strategy(args: &AttackArgs) -> AttackStrategy {
    match args.strategy {
        StrategyKind::MeasureNow => AttackStrategy::MeasureNow {
            basis: match args.basis {
                BasisArg::Computational => MeasureBasis::Computational,
                BasisArg::Hadamard => MeasureBasis::Hadamard,
                BasisArg::Random => MeasureBasis::Random,
                BasisArg::Breidbart => MeasureBasis::Breidbart,
            },
        },
        StrategyKind::BoundedStore => AttackStrategy::BoundedStore { q: args.q },
        StrategyKind::NoisyStore => AttackStrategy::NoisyStore { r: args.r, nu: args.nu },
    }
}

pub fn attack(args: &AttackArgs, seed: u64) -> Result<Value> {
    let s = strategy(args);
    let v = match args.kind {
        AttackKind::Wse => {
            let r = run_wse_attack(s, args.n, args.trials, seed)?;
            json!({"kind": "wse", "reports": [r.per_bit, r.whole_string]})
        }
        AttackKind::Binding => {
            let r = run_binding_attack(&parse_code(&args.code)?, args.dist, args.trials, seed)?;
            json!({
                "kind": "binding",
                "reports": [r.report],
                "envelope": r.envelope,
                "syndrome_forced": r.syndrome_forced,
            })
        }
        AttackKind::Hiding => {
            let target = match args.target {
                HidingTargetKind::Commit => HidingTarget::Commit {
                    code: parse_code(&args.code)?,
                    ell: args.ell,
                    delta: args.delta,
                },
                HidingTargetKind::Frot => HidingTarget::Frot {
                    params: ot_params_toy(args.n, args.beta, args.ell)?,
                    delta: args.delta,
                },
            };
            let r = run_hiding_attack(&target, s, args.trials, seed)?;
            json!({"kind": "hiding", "reports": [r]})
        }
    };
    let mut v = to_value(&v)?;
    v["status"] = json!("ok");
    v["seed"] = json!(seed);
    Ok(v)
}
