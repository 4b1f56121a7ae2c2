use std::f64::consts::PI;

use mecrec::config::{Approach, CumulantMode, ExperimentConfig, PresetName, SamplingMode, SpacingName};
use mecrec::harness::plan_with_origin;
use mecrec::report::{BandwidthSource, CoefficientName, VerdictKind};
use mecrec::{run_case1, run_case2, run_case2_with, HarnessError, ReconReport};
use mecrec_core::dynamics::{ConstantMecs, MecValues, OracleSource};
use mecrec_core::GaussianState;

fn oracle(preset: PresetName, approach: Approach, threshold: f64) -> ExperimentConfig {
    ExperimentConfig {
        preset,
        approach,
        bw_threshold: threshold,
        cumulants: CumulantMode::Oracle,
        ..ExperimentConfig::default()
    }
}

#[test]
fn markovian_coarse_threshold_gives_seven_point_plan() {
    let out = run_case1(&oracle(PresetName::Markovian, Approach::Integral, 1e-3)).unwrap();
    let c = out.report.curve(CoefficientName::CapitalLambda).unwrap();
    assert_eq!(c.point_count, 7);
    assert_eq!(c.plan_times.len(), 8);
    assert_eq!(c.plan_times[0], 0.0);
    assert!((2.0 * PI * c.bandwidth_w / 19.4 - 1.0).abs() < 0.02);
    assert_eq!(c.bandwidth_source, BandwidthSource::Analytic);
}

#[test]
fn noiseless_integral_runs_pass_in_both_regimes() {
    for preset in [PresetName::Markovian, PresetName::NonMarkovian] {
        let out = run_case1(&oracle(preset, Approach::Integral, 1e-4)).unwrap();
        let v = out.report.verdict.unwrap();
        assert_eq!(v.kind, VerdictKind::Pass, "{preset:?}: {v:?}");
    }
}

#[test]
fn errors_are_measured_on_the_trusted_window_only() {
    let out = run_case1(&oracle(PresetName::Markovian, Approach::Integral, 1e-4)).unwrap();
    let c = &out.report.curves[0];
    assert_eq!(c.trusted, (0.0, 1.2 - 0.2));
    assert!(c.eval_times.iter().all(|&t| (0.0..=1.0 + 1e-15).contains(&t)));
    assert_eq!(c.eval_times.len(), out.report.config.eval_points);
}

#[test]
fn report_round_trips_through_its_loader() {
    let out = run_case1(&ExperimentConfig {
        noise_sigma: 1e-4,
        seed: 11,
        ..ExperimentConfig::default()
    })
    .unwrap();
    let json = out.report.to_json();
    let back = ReconReport::from_json(&json).unwrap();
    assert_eq!(back, out.report);
    assert_eq!(back.to_json(), json);
}

#[test]
fn loader_rejects_foreign_schema_and_tampered_config() {
    let out = run_case1(&oracle(PresetName::Markovian, Approach::Integral, 1e-3)).unwrap();
    let mut r = out.report.clone();
    r.schema_version += 1;
    assert!(matches!(ReconReport::from_json(&r.to_json()), Err(HarnessError::Schema(_))));
    let mut r = out.report;
    r.config.seed += 1;
    assert!(matches!(ReconReport::from_json(&r.to_json()), Err(HarnessError::Schema(_))));
}

#[test]
fn equal_config_and_seed_give_equal_reports() {
    let cfg = ExperimentConfig {
        noise_sigma: 1e-4,
        seed: 3,
        ..ExperimentConfig::default()
    };
    let a = run_case1(&cfg).unwrap().report;
    let b = run_case1(&cfg).unwrap().report;
    assert_eq!(a.to_json(), b.to_json());
    let c = run_case1(&ExperimentConfig { seed: 4, ..cfg }).unwrap().report;
    assert_ne!(a.curves[0].reconstructed, c.curves[0].reconstructed);
}

#[test]
fn tomography_changes_errors_within_noise_budget() {
    let base = ExperimentConfig {
        noise_sigma: 1e-4,
        seed: 5,
        ..ExperimentConfig::default()
    };
    let measured = run_case1(&base).unwrap().report;
    let exact = run_case1(&ExperimentConfig {
        cumulants: CumulantMode::Oracle,
        ..base.clone()
    })
    .unwrap()
    .report;
    let (m, e) = (measured.curves[0].errors.unwrap(), exact.curves[0].errors.unwrap());
    assert!((m.rms_rel - e.rms_rel).abs() <= base.noise_budget, "{m:?} vs {e:?}");
    assert!((m.max_rel - e.max_rel).abs() <= base.noise_budget, "{m:?} vs {e:?}");
}

#[test]
fn verdict_detects_a_wrong_cutoff_frequency() {
    let base = ExperimentConfig {
        noise_sigma: 1e-4,
        seed: 1,
        ..ExperimentConfig::default()
    };
    assert_eq!(run_case1(&base).unwrap().report.verdict.unwrap().kind, VerdictKind::Pass);
    for wc in [20.0, 5.0] {
        let wrong = ExperimentConfig {
            theory_omega_c: Some(wc),
            ..base.clone()
        };
        assert_eq!(run_case1(&wrong).unwrap().report.verdict.unwrap().kind, VerdictKind::Fail);
    }
}

#[test]
fn case2_validation_is_within_twice_case1_error() {
    for preset in [PresetName::Markovian, PresetName::NonMarkovian] {
        let cfg = oracle(preset, Approach::Differential, 1e-4);
        let c1 = run_case1(&cfg).unwrap().report;
        let c2 = run_case2(&ExperimentConfig { case: 2, ..cfg }).unwrap().report;
        assert!(c2.verdict.is_none());
        for coef in [CoefficientName::Lambda, CoefficientName::Delta] {
            let a = c1.curve(coef).unwrap().errors.unwrap();
            let b = c2.curve(coef).unwrap();
            assert_eq!(b.bandwidth_source, BandwidthSource::Discrete);
            let b = b.errors.unwrap();
            assert!(b.rms_rel <= 2.0 * a.rms_rel, "{preset:?} {coef:?}: {b:?} vs {a:?}");
        }
    }
}

#[test]
fn case2_without_validation_has_no_theory_column() {
    let cfg = ExperimentConfig {
        case: 2,
        validate: false,
        ..oracle(PresetName::Markovian, Approach::Integral, 1e-4)
    };
    let r = run_case2(&cfg).unwrap().report;
    assert!(r.curves[0].theory.is_none() && r.curves[0].errors.is_none());
}

#[test]
fn constant_coefficients_give_the_minimal_plan() {
    let cfg = ExperimentConfig {
        case: 2,
        approach: Approach::Differential,
        ..ExperimentConfig::default()
    };
    let res = cfg.resolve().unwrap();
    let mecs = ConstantMecs(MecValues {
        lambda: 0.05,
        dqq: 0.02,
        dpp: 0.02,
        dqp: 0.0,
    });
    let src = OracleSource::new(GaussianState::coherent(2.0, 1.0), mecs, res.hamiltonian);
    let r = run_case2_with(&cfg, &src, None).unwrap().report;
    for c in &r.curves {
        assert_eq!(c.bandwidth_source, BandwidthSource::Flat);
        assert_eq!(c.plan_times, vec![0.0, res.tbar]);
    }
    let lam = r.curve(CoefficientName::Lambda).unwrap();
    assert!(lam.reconstructed.iter().all(|v| (v - 0.05).abs() < 1e-6));
}

#[test]
fn noisy_pilot_is_too_sparse() {
    let cfg = ExperimentConfig {
        case: 2,
        approach: Approach::Differential,
        noise_sigma: 1e-3,
        ..ExperimentConfig::default()
    };
    assert!(matches!(run_case2(&cfg), Err(HarnessError::PilotTooSparse { .. })));
}

#[test]
fn random_sampling_reports_plan_and_verdict() {
    for (spacing, free) in [(SpacingName::Exponential, true), (SpacingName::Delta, false)] {
        let cfg = ExperimentConfig {
            sampling: SamplingMode::Random,
            spacing,
            ..oracle(PresetName::Markovian, Approach::Integral, 1e-3)
        };
        let r = run_case1(&cfg).unwrap().report;
        assert!(r.verdict.is_none());
        let c = &r.curves[0];
        assert!(c.shannon.is_empty());
        let rs = c.random.as_ref().unwrap();
        assert_eq!(rs.alias_free, free);
        assert_eq!(rs.times.len(), c.point_count);
        assert_eq!(rs.values.len(), rs.times.len());
    }
}

#[test]
fn config_errors_are_reported_before_work() {
    let e = run_case1(&ExperimentConfig {
        xi: Some(5.0),
        ..ExperimentConfig::default()
    })
    .unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn origin_plan_matches_sample_grid() {
    let w = 19.4 / (2.0 * PI);
    let p = plan_with_origin(w, 1.2);
    assert_eq!(p.len(), 8);
    for (n, t) in p.iter().enumerate() {
        assert!((t - n as f64 / (2.0 * w)).abs() < 1e-15);
    }
}
