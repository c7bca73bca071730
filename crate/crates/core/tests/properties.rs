mod common;

use common::*;
use nsm_core::attacks::{run_wse_attack, AttackStrategy, MeasureBasis};
use nsm_core::channels::{ChannelModel, StorageSpec};
use nsm_core::secparams::{
    check_kappa, ot_error, ot_params, ot_params_toy, ot_params_with_lambda, sampler_delta, wse_error, wse_rate,
};
use nsm_core::Error;

#[test]
fn error_formulas_agree_with_reference() {
    for i in 0..100 {
        let delta = 0.001 + 0.498 * i as f64 / 99.0;
        let n = 10f64.powf(2.0 + 7.0 * ((i * 37) % 100) as f64 / 99.0).round();
        let a = wse_error(delta, n as usize);
        let b = wse_error_reference(delta, n);
        assert!(agree12(a, b), "δ={delta} n={n}: {a} vs {b}");

        let lambda = 0.01 + 0.48 * ((i * 13) % 100) as f64 / 99.0;
        let omega = 2.0 + (i % 7) as f64;
        let beta = 67 + 31 * (i % 11);
        let a = ot_error(lambda, b, n as usize, omega, beta);
        let r = ot_error_reference(lambda, b, n, omega, beta as f64);
        assert!(agree12(a, r), "{a} vs {r}");

        let m = 4 * (1 + i);
        let s = sampler_delta(lambda, m, omega);
        let rs = (-(m as f64) * lambda * lambda / (512.0 * omega * omega) * std::f64::consts::LN_2).exp();
        assert!(agree12(s, rs));
    }
}

#[test]
fn error_bounds_are_vacuous_at_desk_scale() {
    // ε(δ, n) < 1 needs n > 512 (4 + log 1/δ)² ln 2 / δ²
    let delta = 0.1;
    let crossing = 512.0 * (4.0 + (1.0f64 / delta).log2()).powi(2) * 2f64.ln() / (delta * delta);
    assert!(crossing > 1e6);
    assert!(wse_error(delta, 100_000) > 1.0);
    assert!(wse_error(delta, (crossing * 1.01) as usize) < 1.0);
}

fn feasibility(e: Error) -> String {
    match e {
        Error::Feasibility { inequality, .. } => inequality,
        other => panic!("expected a feasibility error, got {other}"),
    }
}

#[test]
fn feasibility_preconditions() {
    let over = StorageSpec::new(ChannelModel::depolarizing(2, 0.9).unwrap(), 1.0).unwrap();
    assert_eq!(feasibility(wse_rate(&over, 1000, 0.01).unwrap_err()), "C_N·ν < 1/2");
    let under = StorageSpec::new(ChannelModel::depolarizing(2, 0.77).unwrap(), 1.0).unwrap();
    assert!(wse_rate(&under, 1000, 0.01).is_ok());
    assert_eq!(feasibility(wse_rate(&under, 1000, 0.02).unwrap_err()), "δ < 1/2 − C_N·ν");

    // κ = m/(sβ) = 4/β with s = m/4, so β ≥ 67 already implies κ ≤ 0.06
    assert_eq!(feasibility(check_kappa(64, 16, 66).unwrap_err()), "κ ≤ 0.06");
    assert!((check_kappa(64, 16, 67).unwrap() - 4.0 / 67.0).abs() < 1e-15);
    assert!(check_kappa(64, 8, 100).is_err());
    assert_eq!(
        feasibility(ot_params_with_lambda(0.1, 0.0, 400 * 16, 2.0, 400).unwrap_err()),
        "β ≥ max{67, 256ω²/λ²}"
    );
    assert!(ot_params_with_lambda(0.5, 0.0, 1 << 30, 2.0, 4096).is_ok());

    // m = n/β must be a multiple of 4
    assert!(matches!(ot_params_toy(60, 6, 2), Err(Error::Argument(_))));
    assert!(matches!(ot_params_toy(64, 3, 2), Err(Error::Argument(_))));
    assert!(matches!(ot_params(&under, 6 * 1024, 0.01, 2.0, 1024), Err(Error::Argument(_))));
}

#[test]
fn attack_estimates_are_ordered() {
    let n = 10;
    let trials = 100_000;
    let est = |basis| run_wse_attack(AttackStrategy::MeasureNow { basis }, n, trials, 21).unwrap().per_bit;
    let breidbart = est(MeasureBasis::Breidbart);
    let random = est(MeasureBasis::Random);
    assert!(breidbart.ci_low > random.ci_high);
    assert!(random.ci_low > 0.5);

    let mut last = 0.0;
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let s = AttackStrategy::NoisyStore { r, nu: 0.5 };
        let rep = run_wse_attack(s, n, trials, 22).unwrap().per_bit;
        assert!(rep.estimate >= last, "r = {r}");
        assert!(rep.contains(s.per_bit_success(n)));
        let (lo, hi) = wilson99(rep.successes, rep.samples);
        assert!((lo - rep.ci_low).abs() < 1e-12 && (hi - rep.ci_high).abs() < 1e-12);
        last = rep.estimate;
    }
}
